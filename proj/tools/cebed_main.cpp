// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include <CLI11.hpp>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cebed/checkpoint.hpp"
#include "cebed/dataset.hpp"
#include "cebed/evalbench.hpp"
#include "cebed/models.hpp"
#include "cebed/train.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cebed;

namespace {

// Inclusive start:stop:step range, or a single value.
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> out;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        out.push_back(std::stod(text));
        return out;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw CLI::ValidationError("range must be start:stop:step");
    const double start = std::stod(text.substr(0, c1));
    const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(text.substr(c2 + 1));
    if (step <= 0 || stop < start) throw CLI::ValidationError("range must be start:stop:step");
    for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
    return out;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string out_root() {
    const char* env = std::getenv("CEBED_OUT_ROOT");
    return env ? env : ".";
}

std::string timestamp() {
    char buf[32];
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    localtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

void write_config(const fs::path& path, const json& cfg) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write config " + path.string());
    os << cfg.dump(2) << "\n";
}

struct GenerateArgs {
    std::string profile = "umi-like";
    int nr = 1, nfp = 72, nsp = 2;
    std::string snr = "0:20:5", speed = "0:15:5";
    int num_samples = 0;
    std::uint64_t seed = 0;
    std::string out;
    int jobs = 1;
};

int run_generate(const GenerateArgs& a) {
    data::DatasetFamily family;
    family.profile = profile_from_name(a.profile);
    family.n_r = a.nr;
    family.n_fp = a.nfp;
    family.n_sp = a.nsp;
    family.snr_domain = parse_range(a.snr);
    family.speed_domain = parse_range(a.speed);

    const std::string out =
        a.out.empty() ? out_root() + "/dataset_seed" + std::to_string(a.seed) : a.out;

    data::Dataset d = data::generate(family, a.num_samples, a.seed, a.jobs);
    data::split_dataset(d, a.seed);
    data::save(d, out);

    json cfg{{"command", "generate"}, {"profile", a.profile},     {"nr", a.nr},
             {"nfp", a.nfp},          {"nsp", a.nsp},             {"snr", family.snr_domain},
             {"speed", family.speed_domain}, {"num_samples", a.num_samples},
             {"seed", std::to_string(a.seed)}, {"out", out},      {"jobs", a.jobs},
             {"format_version", 1}};
    write_config(fs::path(out) / "config.json", cfg);
    std::cout << "wrote " << d.n_samples << " samples to " << out << "\n";
    return 0;
}

struct TrainArgs {
    std::string model;
    std::string dataset;
    std::uint64_t seed = 0;
    std::string out;
    int epochs = 100;
    int batch_size = 512;
    double lr = 1e-3;
};

int run_train(const TrainArgs& a) {
    data::Dataset d = data::load(a.dataset);
    const data::Split split = data::split_dataset(d, derive_seed(a.seed, "split", 0));

    const zoo::ModelName name = zoo::model_name_from(a.model);
    ScenarioSpec sc{d.family.profile, d.family.n_r, d.family.n_fp, d.family.n_sp, 10.0, 0.0};
    zoo::Model model(zoo::ModelSpec::defaults(name, sc), derive_seed(a.seed, "init", 0));

    const auto kind = model.spec().input_kind();
    train::TensorDataset train_split, val_split;
    for (int idx : split.train) {
        train_split.inputs.push_back(zoo::input_adapter(d.observation(idx), kind));
        train_split.targets.push_back(zoo::grid_to_planes(d.channel(idx)));
    }
    for (int idx : split.val) {
        val_split.inputs.push_back(zoo::input_adapter(d.observation(idx), kind));
        val_split.targets.push_back(zoo::grid_to_planes(d.channel(idx)));
    }

    train::TrainConfig tcfg;
    tcfg.initial_lr = a.lr;
    tcfg.batch_size = a.batch_size;
    tcfg.max_epochs = a.epochs;
    tcfg.seed = derive_seed(a.seed, "train", 0);

    const std::string out = a.out.empty() ? out_root() + "/train_" + a.model : a.out;
    fs::create_directories(out);

    const train::TrainHistory history = train::fit(model, train_split, val_split, tcfg);
    nn::save_checkpoint((fs::path(out) / "checkpoint.bin").string(), model.to_entries());
    train::save_history_csv((fs::path(out) / "history.csv").string(), history);

    json cfg{{"command", "train"},
             {"model", a.model},
             {"dataset", a.dataset},
             {"seed", std::to_string(a.seed)},
             {"out", out},
             {"epochs", a.epochs},
             {"batch_size", a.batch_size},
             {"initial_lr", a.lr},
             {"plateau_patience", tcfg.plateau_patience},
             {"plateau_factor", tcfg.plateau_factor},
             {"min_lr", tcfg.min_lr},
             {"early_stop_patience", tcfg.early_stop_patience}};
    write_config(fs::path(out) / "config.json", cfg);

    std::cout << "best val mse " << history.best_val << " at epoch " << (history.best_epoch + 1)
              << " (" << history.epochs.size() << " epochs)\n";
    return 0;
}

struct EvalArgs {
    std::string suite;
    std::string models;
    int seeds = 5;
    int samples = 15000;
    int ood_samples = 7500;
    int epochs = 100;
    int batch_size = 512;
    std::uint64_t seed = 1;
    std::string profiles = "umi-like,uma-like";
    std::string nr = "1,4";
    std::string out;
    int jobs = 1;
};

int run_eval(const EvalArgs& a) {
    bench::BenchConfig cfg;
    cfg.n_samples = a.samples;
    cfg.ood_eval_samples = a.ood_samples;
    cfg.n_seeds = a.seeds;
    cfg.base_seed = a.seed;
    cfg.jobs = a.jobs;
    cfg.tcfg.max_epochs = a.epochs;
    cfg.tcfg.batch_size = a.batch_size;
    cfg.profiles.clear();
    for (const auto& p : split_csv(a.profiles)) cfg.profiles.push_back(profile_from_name(p));
    cfg.n_r_list.clear();
    for (const auto& n : split_csv(a.nr)) cfg.n_r_list.push_back(std::stoi(n));

    const std::string out = a.out.empty()
                                ? out_root() + "/cebed_" + a.suite + "_" + timestamp() + ".json"
                                : a.out;

    const bench::BenchReport report = bench::run_suite(a.suite, split_csv(a.models), cfg);
    bench::write_report_json(report, out);
    fs::path csv = out;
    csv.replace_extension(".csv");
    bench::write_report_csv(report, csv.string());

    json echo = json::parse(report.config_echo);
    echo["command"] = "eval";
    echo["suite"] = a.suite;
    echo["models"] = split_csv(a.models);
    echo["out"] = out;
    write_config(fs::path(out.substr(0, out.size() - fs::path(out).extension().string().size()) +
                          ".config.json"),
                 echo);

    if (report.partial) {
        std::cerr << "WARNING: " << report.failures.size()
                  << " cells failed; report marked partial\n";
        for (const auto& f : report.failures)
            std::cerr << "  " << f.method << " " << f.scenario << " seed " << f.seed << ": "
                      << f.error << "\n";
    }
    std::cout << "wrote " << out << " and " << csv.string() << "\n";
    return 0;
}

struct ReportArgs {
    std::string in;
    std::string format = "md";
    std::string out;
};

int run_report(const ReportArgs& a) {
    const bench::BenchReport report = bench::read_report_json(a.in);
    const bool to_file = !a.out.empty();
    if (a.format == "csv") {
        if (to_file)
            bench::write_report_csv(report, a.out);
        else {
            const std::string tmp = a.in + ".tmp.csv";
            bench::write_report_csv(report, tmp);
            std::ifstream is(tmp);
            std::cout << is.rdbuf();
            fs::remove(tmp);
        }
    } else if (a.format == "json") {
        if (to_file)
            bench::write_report_json(report, a.out);
        else {
            std::ifstream is(a.in);
            std::cout << is.rdbuf();
        }
    } else if (a.format == "md") {
        const std::string md = bench::report_markdown(report);
        if (to_file) {
            std::ofstream os(a.out);
            os << md;
        } else {
            std::cout << md;
        }
    } else {
        throw CLI::ValidationError("--format must be csv, json or md");
    }
    if (to_file) {
        json cfg{{"command", "report"}, {"in", a.in}, {"format", a.format}, {"out", a.out}};
        write_config(fs::path(a.out + ".config.json"), cfg);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cebed: pilot-assisted OFDM channel estimation benchmark"};
    app.require_subcommand(1);

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "generate a fading-channel dataset");
    gen->add_option("--profile", ga.profile, "channel profile (umi-like|uma-like)")
        ->check(CLI::IsMember({"umi-like", "uma-like"}));
    gen->add_option("--nr", ga.nr, "receive antennas");
    gen->add_option("--nfp", ga.nfp, "pilot subcarriers");
    gen->add_option("--nsp", ga.nsp, "pilot symbols");
    gen->add_option("--snr", ga.snr, "SNR domain, start:stop:step dB or one value");
    gen->add_option("--speed", ga.speed, "speed domain, start:stop:step m/s or one value");
    gen->add_option("--num-samples", ga.num_samples, "sample count")->required();
    gen->add_option("--seed", ga.seed, "master seed");
    gen->add_option("--out", ga.out, "output directory");
    gen->add_option("--jobs", ga.jobs, "parallel worker bound (default 1)");

    TrainArgs ta;
    auto* tr = app.add_subcommand("train", "train one deep estimator on a dataset");
    tr->add_option("--model", ta.model, "model name")->required();
    tr->add_option("--dataset", ta.dataset, "dataset directory")->required();
    tr->add_option("--seed", ta.seed, "seed (split + init + batches)");
    tr->add_option("--out", ta.out, "output directory");
    tr->add_option("--epochs", ta.epochs, "max epochs");
    tr->add_option("--batch-size", ta.batch_size, "batch size");
    tr->add_option("--lr", ta.lr, "initial learning rate");

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "run a standardized evaluation suite");
    ev->add_option("--suite", ea.suite, "accuracy|ood|pilot|spatial")
        ->required()
        ->check(CLI::IsMember(
            {"accuracy", "ood", "pilot", "spatial", "pilot_robustness", "spatial_robustness"}));
    ev->add_option("--models", ea.models, "comma-separated deep baselines (classical always run)");
    ev->add_option("--seeds", ea.seeds, "number of seeds");
    ev->add_option("--samples", ea.samples, "samples per scenario dataset");
    ev->add_option("--ood-samples", ea.ood_samples, "OOD evaluation samples");
    ev->add_option("--epochs", ea.epochs, "max training epochs");
    ev->add_option("--batch-size", ea.batch_size, "training batch size");
    ev->add_option("--seed", ea.seed, "base seed");
    ev->add_option("--profiles", ea.profiles, "profiles for accuracy/ood");
    ev->add_option("--nr", ea.nr, "antenna counts for accuracy/ood");
    ev->add_option("--out", ea.out, "report file (.json)");
    ev->add_option("--jobs", ea.jobs, "parallel worker bound (default 1)");

    ReportArgs ra;
    auto* rp = app.add_subcommand("report", "format a report file");
    rp->add_option("--in", ra.in, "report JSON")->required();
    rp->add_option("--format", ra.format, "csv|json|md")
        ->check(CLI::IsMember({"csv", "json", "md"}));
    rp->add_option("--out", ra.out, "output file (stdout if omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
#ifdef _OPENMP
        int jobs = 0;
        if (gen->parsed()) jobs = ga.jobs;
        if (ev->parsed()) jobs = ea.jobs;
        if (jobs > 0) omp_set_num_threads(jobs);
#endif
        if (gen->parsed()) return run_generate(ga);
        if (tr->parsed()) return run_train(ta);
        if (ev->parsed()) return run_eval(ea);
        if (rp->parsed()) return run_report(ra);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
