// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cebed/dataset.hpp"
#include "cebed/grid.hpp"
#include "cebed/train.hpp"

namespace cebed::bench {

// Mean of |est - truth|^2 over all antennas, subcarriers and symbols.
double mse(const ComplexGrid& est, const ComplexGrid& truth);

// 10 log10(mse_ls / mse_method); positive when the method beats LS.
double gain_db(double mse_ls, double mse_method);

// 100 * max(0, (mse_nn - mse_ls) / (mse_lmmse - mse_ls)); 100 means
// LMMSE-level accuracy, 0 means no improvement over LS.
double normalized_score(double mse_nn, double mse_ls, double mse_lmmse);

// Student-t 95% interval: (mean, t_{0.975,n-1} * s / sqrt(n)).
std::pair<double, double> ci95(const std::vector<double>& values);
double t_quantile_975(int df);

struct ScenarioCell {
    Profile profile = Profile::UmiLike;
    int n_r = 1, n_fp = 72, n_sp = 2;
    std::vector<double> speed_domain;

    std::string label() const;
};

// One measurement: a method on a scenario under one seed, either for a
// single SNR bucket or pooled over the evaluation set (snr_db = NaN).
struct EvalRecord {
    std::string method;
    std::string scenario;
    int seed = 0;
    double snr_db = 0;  // NaN marks the pooled record
    double mse = 0;
    long samples = 0;
};

struct CellFailure {
    std::string method, scenario;
    int seed = 0;
    std::string error;
};

struct ReportRow {
    std::string method;
    std::string scenario;
    Profile profile = Profile::UmiLike;
    int n_r = 0, n_fp = 0, n_sp = 0;
    std::string snr;  // decimal dB or "all"
    int n_seeds = 0;
    double mean_mse = 0, ci95_half = 0, gain_db = 0, norm_score = 0;
};

struct BenchConfig {
    int n_samples = 15000;
    int ood_eval_samples = 7500;
    int n_seeds = 5;
    std::uint64_t base_seed = 1;
    std::vector<Profile> profiles{Profile::UmiLike, Profile::UmaLike};
    std::vector<int> n_r_list{1, 4};
    std::vector<double> snr_domain{0, 5, 10, 15, 20};
    std::vector<double> speed_domain{0, 5, 10, 15};
    std::vector<double> ood_snr_domain{-30, -25, -20, -15, -10, -5, 25, 30};
    int almmse_rank_div = 4;
    train::TrainConfig tcfg;
    int eval_batch = 256;
    int jobs = 1;
};

struct BenchReport {
    int schema_version = 1;
    std::string suite;
    std::vector<int> seeds;
    std::vector<EvalRecord> records;
    std::vector<CellFailure> failures;
    bool partial = false;
    std::map<std::string, std::string> dataset_hashes;  // scenario -> fnv1a64
    std::string config_echo;                            // JSON text
    std::vector<ScenarioCell> scenarios;

    // Aggregated rows: pooled first, then per-SNR, per (method, scenario).
    std::vector<ReportRow> rows() const;
};

// Runs one standardized suite over methods x scenarios x seeds.
// "LS", "LMMSE" and "ALMMSE" are always included as references.
BenchReport run_suite(const std::string& suite, std::vector<std::string> methods,
                      const BenchConfig& cfg);

void write_report_json(const BenchReport& report, const std::string& path);
void write_report_csv(const BenchReport& report, const std::string& path);
std::string report_markdown(const BenchReport& report);
BenchReport read_report_json(const std::string& path);

std::string config_to_json(const BenchConfig& cfg);

}  // namespace cebed::bench
