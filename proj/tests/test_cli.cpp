// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

std::string cebed_bin() {
    const char* bin = std::getenv("CEBED_BIN");
    REQUIRE(bin != nullptr);
    return bin;
}

int run(const std::string& args) {
    const std::string cmd = cebed_bin() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    return std::vector<char>(std::istreambuf_iterator<char>(is), {});
}

struct TempDir {
    fs::path path;
    explicit TempDir(const char* name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("help exits zero, usage errors exit two") {
    CHECK(run("--help") == 0);
    CHECK(run("generate --help") == 0);
    CHECK(run("frobnicate") == 2);
    CHECK(run("generate --num-samples 10 --no-such-flag 1") == 2);
    CHECK(run("generate") == 2);  // missing required flag
    CHECK(run("") == 2);          // missing subcommand
}

TEST_CASE("runtime failures exit one") {
    CHECK(run("train --model DDAE --dataset /nonexistent --out /tmp/cebed_cli_x") == 1);
    CHECK(run("report --in /nonexistent.json") == 1);
}

TEST_CASE("generate, eval and report compose end to end") {
    TempDir dir("cebed_cli_e2e");
    const std::string ds = (dir.path / "ds").string();
    const std::string rep = (dir.path / "rep.json").string();

    CHECK(run("generate --profile umi-like --nr 1 --nfp 72 --nsp 2 --snr 0:20:5 --speed 0:15:5"
              " --num-samples 200 --seed 7 --out " + ds) == 0);
    CHECK(fs::exists(ds + "/manifest.json"));
    CHECK(fs::exists(ds + "/config.json"));

    CHECK(run("eval --suite accuracy --seeds 2 --samples 200 --profiles umi-like --nr 1 --seed 7"
              " --out " + rep) == 0);
    REQUIRE(fs::exists(rep));
    CHECK(fs::exists((dir.path / "rep.csv")));
    CHECK(fs::exists((dir.path / "rep.config.json")));

    // LS must do worse than LMMSE in the aggregate rows
    std::ifstream is(rep);
    const nlohmann::json j = nlohmann::json::parse(is);
    double ls = -1, lmmse = -1;
    for (const auto& row : j.at("rows"))
        if (row.at("snr") == "all") {
            if (row.at("method") == "LS") ls = row.at("mean_mse").get<double>();
            if (row.at("method") == "LMMSE") lmmse = row.at("mean_mse").get<double>();
        }
    REQUIRE(ls > 0);
    REQUIRE(lmmse > 0);
    CHECK(ls > lmmse);

    // report renders csv and md from the stored file
    CHECK(run("report --in " + rep + " --format csv --out " + (dir.path / "out.csv").string()) ==
          0);
    CHECK(run("report --in " + rep + " --format md --out " + (dir.path / "out.md").string()) == 0);
    CHECK(slurp(dir.path / "out.md").size() > 100);
}

TEST_CASE("identical seeds reproduce byte-identical datasets") {
    TempDir dir("cebed_cli_repro");
    const std::string a = (dir.path / "a").string();
    const std::string b = (dir.path / "b").string();
    CHECK(run("generate --num-samples 60 --seed 5 --out " + a) == 0);
    CHECK(run("generate --num-samples 60 --seed 5 --out " + b) == 0);
    for (const char* f : {"h_true.bin", "y_p.bin", "x_p.bin", "manifest.json"})
        CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
}

TEST_CASE("train subcommand writes a checkpoint, history and config") {
    TempDir dir("cebed_cli_train");
    const std::string ds = (dir.path / "ds").string();
    const std::string out = (dir.path / "run").string();
    CHECK(run("generate --num-samples 100 --snr 10 --speed 5 --seed 3 --out " + ds) == 0);
    CHECK(run("train --model DDAE --dataset " + ds + " --seed 1 --epochs 1 --batch-size 32 --out " +
              out) == 0);
    CHECK(fs::exists(out + "/checkpoint.bin"));
    CHECK(fs::exists(out + "/history.csv"));
    CHECK(fs::exists(out + "/config.json"));
}
