// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "cebed/channel.hpp"
#include "cebed/evalbench.hpp"

using namespace cebed;
using namespace cebed::bench;

namespace {

BenchConfig desk_config(int samples = 200, int seeds = 2) {
    BenchConfig cfg;
    cfg.n_samples = samples;
    cfg.ood_eval_samples = 80;
    cfg.n_seeds = seeds;
    cfg.profiles = {Profile::UmiLike};
    cfg.n_r_list = {1};
    cfg.tcfg.max_epochs = 2;
    cfg.tcfg.batch_size = 64;
    return cfg;
}

}  // namespace

TEST_CASE("mse on complex grids") {
    ComplexGrid a(GridDims{1, 1}, 1, {cd{1.0, 1.0}});
    ComplexGrid b(GridDims{1, 1}, 1, {cd{0.0, 0.0}});
    CHECK(mse(a, a) == 0.0);
    CHECK(mse(a, b) == 2.0);

    const ScenarioSpec sc{Profile::UmiLike, 1, 72, 2, 10.0, 5.0};
    const ComplexGrid h =
        channel::sample_channel(sc, channel::profile_preset(Profile::UmiLike), 3).grid;
    ComplexGrid zeros(h.dims(), 1);
    CHECK(mse(zeros, h) == doctest::Approx(1.0).epsilon(1e-9));

    ComplexGrid wrong(GridDims{2, 1}, 1);
    CHECK_THROWS_AS(mse(a, wrong), std::invalid_argument);
}

TEST_CASE("mse is invariant under simultaneous antenna permutation") {
    Rng rng(5);
    ComplexGrid est(GridDims{6, 4}, 3), truth(GridDims{6, 4}, 3);
    for (cd& v : est.data()) v = rng.cgaussian();
    for (cd& v : truth.data()) v = rng.cgaussian();
    ComplexGrid est_p = est, truth_p = truth;
    for (int f = 0; f < 6; ++f)
        for (int s = 0; s < 4; ++s) {
            std::swap(est_p.at(0, f, s), est_p.at(2, f, s));
            std::swap(truth_p.at(0, f, s), truth_p.at(2, f, s));
        }
    CHECK(mse(est_p, truth_p) == doctest::Approx(mse(est, truth)).epsilon(1e-12));
}

TEST_CASE("gain_db reproduces the printed reference pairs") {
    CHECK(std::abs(gain_db(0.24, 0.017) - 11.47) <= 0.15);
    CHECK(std::abs(gain_db(152.81, 0.39) - 25.92) <= 0.15);
    CHECK(gain_db(0.3, 0.3) == 0.0);
    CHECK_THROWS_AS(gain_db(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(gain_db(0.1, -0.1), std::invalid_argument);
}

TEST_CASE("gain_db is antisymmetric") {
    Rng rng(6);
    for (int i = 0; i < 50; ++i) {
        const double a = 0.01 + rng.uniform();
        const double b = 0.01 + rng.uniform();
        CHECK(std::abs(gain_db(a, b) + gain_db(b, a)) < 1e-12);
    }
}

TEST_CASE("normalized score identities") {
    CHECK(normalized_score(0.004, 0.24, 0.004) == 100.0);
    CHECK(normalized_score(0.24, 0.24, 0.004) == 0.0);
    CHECK(normalized_score((0.24 + 0.004) / 2, 0.24, 0.004) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(normalized_score(0.5, 0.24, 0.004) == 0.0);  // worse than LS clamps at zero
    CHECK(normalized_score(0.001, 0.24, 0.004) > 100.0);  // beating LMMSE is allowed
    CHECK_THROWS_AS(normalized_score(0.1, 0.2, 0.2), std::invalid_argument);

    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const double ls = 0.1 + rng.uniform();
        const double lmmse = 0.001 + 0.05 * rng.uniform();
        CHECK(normalized_score(lmmse, ls, lmmse) == 100.0);
        CHECK(normalized_score(ls, ls, lmmse) == 0.0);
    }
}

TEST_CASE("ci95 uses the Student-t quantiles") {
    const auto [m0, h0] = ci95({2.0, 2.0, 2.0});
    CHECK(m0 == 2.0);
    CHECK(h0 == 0.0);

    const auto [m1, h1] = ci95({1, 2, 3, 4, 5});
    CHECK(m1 == 3.0);
    CHECK(h1 == doctest::Approx(1.963).epsilon(1e-3));

    const auto [m2, h2] = ci95({0.0, 2.0});
    CHECK(m2 == 1.0);
    CHECK(h2 == doctest::Approx(12.706).epsilon(1e-3));

    CHECK_THROWS_AS(ci95({1.0}), std::invalid_argument);
    CHECK(t_quantile_975(30) == doctest::Approx(2.042));
    CHECK(t_quantile_975(1000000) == doctest::Approx(1.96).epsilon(1e-3));
}

TEST_CASE("accuracy suite bookkeeping at desk scale") {
    const BenchReport report = run_suite("accuracy", {}, desk_config());
    CHECK(report.suite == "accuracy");
    CHECK_FALSE(report.partial);
    CHECK(report.scenarios.size() == 1);

    // exactly n_seeds pooled records per (method, scenario), distinct seeds
    for (const std::string& method : {"LS", "LMMSE", "ALMMSE"}) {
        std::vector<int> seeds;
        for (const auto& r : report.records)
            if (r.method == method && std::isnan(r.snr_db)) seeds.push_back(r.seed);
        CHECK(seeds.size() == 2);
        std::sort(seeds.begin(), seeds.end());
        CHECK(std::adjacent_find(seeds.begin(), seeds.end()) == seeds.end());
    }

    // aggregation is invariant to record order
    BenchReport shuffled = report;
    std::reverse(shuffled.records.begin(), shuffled.records.end());
    const auto rows_a = report.rows();
    auto rows_b = shuffled.rows();
    REQUIRE(rows_a.size() == rows_b.size());
    for (const auto& row : rows_a) {
        const auto it = std::find_if(rows_b.begin(), rows_b.end(), [&](const ReportRow& r) {
            return r.method == row.method && r.scenario == row.scenario && r.snr == row.snr;
        });
        REQUIRE(it != rows_b.end());
        CHECK(it->mean_mse == row.mean_mse);
        CHECK(it->ci95_half == row.ci95_half);
    }

    // LMMSE beats LS in every cell at this scale
    for (const auto& row : rows_a)
        if (row.method == "LMMSE" && row.snr == "all") CHECK(row.gain_db > 3.0);
}

TEST_CASE("ood suite evaluates only outside the training SNRs") {
    BenchConfig cfg = desk_config(150, 1);
    const BenchReport report = run_suite("ood", {}, cfg);
    CHECK_FALSE(report.partial);
    int checked = 0;
    for (const auto& r : report.records)
        if (!std::isnan(r.snr_db)) {
            CHECK((r.snr_db < 0.0 || r.snr_db > 20.0));
            ++checked;
        }
    CHECK(checked > 0);
}

TEST_CASE("robustness suites enumerate the standardized scenario sweeps") {
    BenchConfig cfg = desk_config(120, 1);
    const BenchReport pilot = run_suite("pilot", {}, cfg);
    CHECK(pilot.suite == "pilot_robustness");
    REQUIRE(pilot.scenarios.size() == 4);
    CHECK(pilot.scenarios[0].n_fp == 72);
    CHECK(pilot.scenarios[0].n_sp == 2);
    CHECK(pilot.scenarios[3].n_fp == 36);
    CHECK(pilot.scenarios[3].n_sp == 1);
    for (const auto& c : pilot.scenarios) CHECK(c.speed_domain == std::vector<double>{15.0});
    CHECK_FALSE(pilot.partial);

    const BenchReport spatial = run_suite("spatial", {}, cfg);
    REQUIRE(spatial.scenarios.size() == 4);
    CHECK(spatial.scenarios[3].n_r == 16);
    for (const auto& c : spatial.scenarios) CHECK(c.speed_domain == std::vector<double>{5.0});
    CHECK_FALSE(spatial.partial);

    CHECK_THROWS_AS(run_suite("latency", {}, cfg), std::invalid_argument);
}

TEST_CASE("failed cells are flagged, never dropped") {
    BenchConfig cfg = desk_config(60, 1);  // train split of 48 < n_fp, stats must fail
    const BenchReport report = run_suite("accuracy", {}, cfg);
    CHECK(report.partial);
    CHECK(report.failures.size() == 2);  // LMMSE and ALMMSE need the stats, LS does not
    for (const auto& f : report.failures) CHECK_FALSE(f.error.empty());
    bool ls_present = false;
    for (const auto& r : report.records) ls_present = ls_present || r.method == "LS";
    CHECK(ls_present);
}

TEST_CASE("reports round-trip through JSON and render to CSV") {
    const BenchReport report = run_suite("accuracy", {}, desk_config(150, 2));
    const auto dir = std::filesystem::temp_directory_path();
    const std::string jpath = (dir / "cebed_report_test.json").string();
    const std::string cpath = (dir / "cebed_report_test.csv").string();
    write_report_json(report, jpath);
    write_report_csv(report, cpath);

    const BenchReport back = read_report_json(jpath);
    CHECK(back.suite == report.suite);
    REQUIRE(back.records.size() == report.records.size());
    for (std::size_t i = 0; i < back.records.size(); ++i) {
        CHECK(back.records[i].method == report.records[i].method);
        CHECK(back.records[i].mse == report.records[i].mse);
    }
    const std::string md = report_markdown(back);
    CHECK(md.find("| method |") != std::string::npos);
    CHECK(md.find("LMMSE") != std::string::npos);

    std::filesystem::remove(jpath);
    std::filesystem::remove(cpath);
}
