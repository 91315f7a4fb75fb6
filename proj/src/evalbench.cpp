// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <stdexcept>

#include "cebed/models.hpp"

namespace cebed::bench {

using json = nlohmann::json;

double mse(const ComplexGrid& est, const ComplexGrid& truth) {
    if (!(est.dims() == truth.dims()) || est.antennas() != truth.antennas())
        throw std::invalid_argument("mse: shape mismatch");
    double acc = 0.0;
    const auto& a = est.data();
    const auto& b = truth.data();
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

double gain_db(double mse_ls, double mse_method) {
    if (!(mse_ls > 0.0) || !(mse_method > 0.0))
        throw std::invalid_argument("gain_db: inputs must be positive");
    return 10.0 * std::log10(mse_ls / mse_method);
}

double normalized_score(double mse_nn, double mse_ls, double mse_lmmse) {
    if (mse_lmmse == mse_ls)
        throw std::invalid_argument("normalized_score: degenerate LS/LMMSE reference");
    return 100.0 * std::max(0.0, (mse_nn - mse_ls) / (mse_lmmse - mse_ls));
}

double t_quantile_975(int df) {
    if (df < 1) throw std::invalid_argument("t_quantile_975: df must be >= 1");
    static constexpr double table[30] = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (df <= 30) return table[df - 1];
    // interpolate in 1/df between the classic anchors
    static constexpr std::pair<int, double> anchors[] = {
        {30, 2.042}, {40, 2.021}, {60, 2.000}, {120, 1.980}};
    if (df >= 120) {
        if (df >= 1000) return 1.960;
        const double w = (1.0 / df - 1.0 / 1000) / (1.0 / 120 - 1.0 / 1000);
        return 1.960 + w * (1.980 - 1.960);
    }
    for (int i = 0; i < 3; ++i) {
        const auto [d0, t0] = anchors[i];
        const auto [d1, t1] = anchors[i + 1];
        if (df <= d1) {
            const double w = (1.0 / df - 1.0 / d1) / (1.0 / d0 - 1.0 / d1);
            return t1 + w * (t0 - t1);
        }
    }
    return 1.960;
}

std::pair<double, double> ci95(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    if (n < 2) throw std::invalid_argument("ci95: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (n - 1);
    const double half = t_quantile_975(n - 1) * std::sqrt(var) / std::sqrt(static_cast<double>(n));
    return {mean, half};
}

std::string ScenarioCell::label() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s_nr%d_nfp%d_nsp%d", profile_name(profile), n_r, n_fp, n_sp);
    return buf;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string hash_hex(const std::vector<float>& data) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64_bytes(data.data(), data.size() * sizeof(float))));
    return hex;
}

std::string canonical_suite(std::string s) {
    if (s == "pilot") return "pilot_robustness";
    if (s == "spatial") return "spatial_robustness";
    return s;
}

std::vector<ScenarioCell> suite_scenarios(const std::string& suite, const BenchConfig& cfg) {
    std::vector<ScenarioCell> cells;
    if (suite == "accuracy" || suite == "ood") {
        for (Profile p : cfg.profiles)
            for (int nr : cfg.n_r_list) cells.push_back({p, nr, 72, 2, cfg.speed_domain});
    } else if (suite == "pilot_robustness") {
        for (auto [nfp, nsp] : {std::pair{72, 2}, {72, 1}, {36, 2}, {36, 1}})
            cells.push_back({Profile::UmiLike, 1, nfp, nsp, {15.0}});
    } else if (suite == "spatial_robustness") {
        for (int nr : {1, 4, 8, 16}) cells.push_back({Profile::UmiLike, nr, 72, 2, {5.0}});
    } else {
        throw std::invalid_argument("run_suite: unknown suite " + suite);
    }
    return cells;
}

bool is_classical(const std::string& m) { return m == "LS" || m == "LMMSE" || m == "ALMMSE"; }

// Accumulates per-SNR and pooled MSE for one (method, seed) pass.
struct CellAccumulator {
    std::map<double, std::pair<double, long>> per_snr;

    void add(double snr, double sample_mse) {
        auto& slot = per_snr[snr];
        slot.first += sample_mse;
        slot.second += 1;
    }
    void emit(BenchReport& report, const std::string& method, const std::string& scenario,
              int seed) const {
        double total = 0.0;
        long count = 0;
        for (const auto& [snr, acc] : per_snr) {
            report.records.push_back(
                {method, scenario, seed, snr, acc.first / acc.second, acc.second});
            total += acc.first;
            count += acc.second;
        }
        report.records.push_back(
            {method, scenario, seed, std::nan(""), total / count, count});
    }
};

// Everything reusable across seeds for one scenario.
struct ScenarioContext {
    data::Dataset dataset;
    data::Dataset ood_set;  // empty unless the suite is ood
    bool use_ood = false;
    std::vector<nn::Tensor> targets;                       // train/val targets
    std::map<zoo::InputKind, std::vector<nn::Tensor>> inputs;

    const std::vector<nn::Tensor>& inputs_for(zoo::InputKind kind) {
        auto it = inputs.find(kind);
        if (it != inputs.end()) return it->second;
        std::vector<nn::Tensor> v(dataset.n_samples);
        for (int i = 0; i < dataset.n_samples; ++i)
            v[i] = zoo::input_adapter(dataset.observation(i), kind);
        return inputs.emplace(kind, std::move(v)).first->second;
    }
    const std::vector<nn::Tensor>& targets_all() {
        if (targets.empty()) {
            targets.resize(dataset.n_samples);
            for (int i = 0; i < dataset.n_samples; ++i)
                targets[i] = zoo::grid_to_planes(dataset.channel(i));
        }
        return targets;
    }
};

}  // namespace

std::vector<ReportRow> BenchReport::rows() const {
    std::vector<ReportRow> out;
    // Stable method/scenario orders as first seen in the record stream.
    std::vector<std::string> methods, scen_labels;
    for (const auto& r : records) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        if (std::find(scen_labels.begin(), scen_labels.end(), r.scenario) == scen_labels.end())
            scen_labels.push_back(r.scenario);
    }

    auto cell_of = [&](const std::string& label) {
        for (const auto& c : scenarios)
            if (c.label() == label) return c;
        return ScenarioCell{};
    };

    // (method, scenario, snr-or-all) -> per-seed pooled mse
    auto collect = [&](const std::string& m, const std::string& sc, double snr,
                       bool pooled) -> std::vector<double> {
        std::vector<double> vals;
        for (const auto& r : records) {
            if (r.method != m || r.scenario != sc) continue;
            const bool r_pooled = std::isnan(r.snr_db);
            if (pooled != r_pooled) continue;
            if (!pooled && r.snr_db != snr) continue;
            vals.push_back(r.mse);
        }
        return vals;
    };

    for (const auto& sc : scen_labels) {
        std::set<double> snrs;
        for (const auto& r : records)
            if (r.scenario == sc && !std::isnan(r.snr_db)) snrs.insert(r.snr_db);

        auto mean_of = [&](const std::string& m, double snr, bool pooled) {
            const auto vals = collect(m, sc, snr, pooled);
            double s = 0.0;
            for (double v : vals) s += v;
            return vals.empty() ? std::nan("") : s / static_cast<double>(vals.size());
        };

        auto push_row = [&](const std::string& m, double snr, bool pooled) {
            const auto vals = collect(m, sc, snr, pooled);
            if (vals.empty()) return;
            ReportRow row;
            row.method = m;
            row.scenario = sc;
            const ScenarioCell cell = cell_of(sc);
            row.profile = cell.profile;
            row.n_r = cell.n_r;
            row.n_fp = cell.n_fp;
            row.n_sp = cell.n_sp;
            row.snr = pooled ? "all" : fmt(snr);
            row.n_seeds = static_cast<int>(vals.size());
            if (vals.size() >= 2) {
                const auto [mean, half] = ci95(vals);
                row.mean_mse = mean;
                row.ci95_half = half;
            } else {
                row.mean_mse = vals[0];
                row.ci95_half = 0.0;
            }
            const double ls = mean_of("LS", snr, pooled);
            const double lmmse = mean_of("LMMSE", snr, pooled);
            row.gain_db = (ls > 0 && row.mean_mse > 0) ? gain_db(ls, row.mean_mse) : std::nan("");
            row.norm_score = (!std::isnan(ls) && !std::isnan(lmmse) && lmmse != ls)
                                 ? normalized_score(row.mean_mse, ls, lmmse)
                                 : std::nan("");
            out.push_back(std::move(row));
        };

        for (const auto& m : methods) {
            push_row(m, 0.0, /*pooled=*/true);
            for (double snr : snrs) push_row(m, snr, /*pooled=*/false);
        }
    }
    return out;
}

BenchReport run_suite(const std::string& suite_in, std::vector<std::string> methods,
                      const BenchConfig& cfg) {
    const std::string suite = canonical_suite(suite_in);
    const std::vector<ScenarioCell> cells = suite_scenarios(suite, cfg);

    // References always run first so every report can compute gains.
    std::vector<std::string> ordered{"LS", "LMMSE", "ALMMSE"};
    for (auto& m : methods)
        if (std::find(ordered.begin(), ordered.end(), m) == ordered.end()) {
            zoo::model_name_from(m);  // validates early
            ordered.push_back(m);
        }

    BenchReport report;
    report.suite = suite;
    report.scenarios = cells;
    report.config_echo = config_to_json(cfg);
    for (int s = 0; s < cfg.n_seeds; ++s) report.seeds.push_back(s);

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const ScenarioCell& cell = cells[ci];
        const std::uint64_t scenario_seed = derive_seed(cfg.base_seed, "scenario", ci);

        ScenarioContext ctx;
        data::DatasetFamily family{cell.profile, cell.n_r, cell.n_fp, cell.n_sp, cfg.snr_domain,
                                   cell.speed_domain};
        ctx.dataset =
            data::generate(family, cfg.n_samples, derive_seed(scenario_seed, "data", 0), cfg.jobs);
        report.dataset_hashes[cell.label()] = hash_hex(ctx.dataset.h_true);
        if (suite == "ood") {
            data::DatasetFamily ood_family = family;
            ood_family.snr_domain = cfg.ood_snr_domain;
            ctx.ood_set = data::generate(ood_family, cfg.ood_eval_samples,
                                         derive_seed(scenario_seed, "ood", 0), cfg.jobs);
            ctx.use_ood = true;
        }
        const pilots::PilotPattern geometry =
            pilots::block_pattern(family.dims, family.n_fp, family.n_sp, 0);

        for (int seed = 0; seed < cfg.n_seeds; ++seed) {
            const data::Split split =
                data::split_dataset(ctx.dataset, derive_seed(scenario_seed, "split", seed));

            // Lazy genie statistics; failures surface per method cell.
            std::optional<est::ChannelStats> stats;
            auto train_stats = [&]() -> const est::ChannelStats& {
                if (!stats) {
                    est::StatsAccumulator acc(geometry);
                    for (int idx : split.train) acc.add(ctx.dataset.channel(idx));
                    stats = acc.finalize();
                }
                return *stats;
            };

            const data::Dataset& eval_set = ctx.use_ood ? ctx.ood_set : ctx.dataset;
            std::vector<int> eval_ids;
            if (ctx.use_ood) {
                eval_ids.resize(ctx.ood_set.n_samples);
                for (int i = 0; i < ctx.ood_set.n_samples; ++i) eval_ids[i] = i;
            } else {
                eval_ids = split.test;
            }

            for (std::size_t mi = 0; mi < ordered.size(); ++mi) {
                const std::string& method = ordered[mi];
                try {
                    CellAccumulator cell_acc;
                    if (is_classical(method)) {
                        const int rank = std::max(1, cell.n_fp / cfg.almmse_rank_div);
                        for (int idx : eval_ids) {
                            const est::PilotObservation obs = eval_set.observation(idx);
                            ComplexGrid estg;
                            if (method == "LS")
                                estg = est::interpolate_linear(est::ls_pilot(obs), obs.pattern,
                                                               obs.pattern.dims);
                            else if (method == "LMMSE")
                                estg = est::lmmse_2d(obs, train_stats());
                            else
                                estg = est::almmse(obs, train_stats(), rank);
                            cell_acc.add(eval_set.snr_db[idx], mse(estg, eval_set.channel(idx)));
                        }
                    } else {
                        const zoo::ModelName name = zoo::model_name_from(method);
                        ScenarioSpec sc{cell.profile, cell.n_r, cell.n_fp,
                                        cell.n_sp,    10.0,     cell.speed_domain.front()};
                        zoo::Model model(
                            zoo::ModelSpec::defaults(name, sc),
                            derive_seed(scenario_seed, "init", seed * 100 + static_cast<int>(mi)));

                        const auto kind = model.spec().input_kind();
                        const auto& inputs = ctx.inputs_for(kind);
                        const auto& targets = ctx.targets_all();
                        train::TensorDataset train_split, val_split;
                        for (int idx : split.train) {
                            train_split.inputs.push_back(inputs[idx]);
                            train_split.targets.push_back(targets[idx]);
                        }
                        for (int idx : split.val) {
                            val_split.inputs.push_back(inputs[idx]);
                            val_split.targets.push_back(targets[idx]);
                        }
                        train::TrainConfig tcfg = cfg.tcfg;
                        tcfg.seed = derive_seed(scenario_seed, "train",
                                                seed * 100 + static_cast<int>(mi));
                        train::fit(model, train_split, val_split, tcfg);

                        std::vector<nn::Tensor> eval_inputs;
                        eval_inputs.reserve(eval_ids.size());
                        for (int idx : eval_ids)
                            eval_inputs.push_back(zoo::input_adapter(eval_set.observation(idx), kind));
                        const std::vector<nn::Tensor> outs =
                            zoo::estimate_batch(model, eval_inputs, cfg.eval_batch);
                        for (std::size_t i = 0; i < eval_ids.size(); ++i)
                            cell_acc.add(eval_set.snr_db[eval_ids[i]],
                                         mse(zoo::planes_to_grid(outs[i]),
                                             eval_set.channel(eval_ids[i])));
                    }
                    cell_acc.emit(report, method, cell.label(), seed);
                } catch (const std::exception& e) {
                    report.failures.push_back({method, cell.label(), seed, e.what()});
                    report.partial = true;
                }
            }
        }
    }
    return report;
}

namespace {

json record_to_json(const EvalRecord& r) {
    json j{{"method", r.method}, {"scenario", r.scenario}, {"seed", r.seed},
           {"mse", r.mse},       {"samples", r.samples}};
    if (std::isnan(r.snr_db))
        j["snr_db"] = nullptr;
    else
        j["snr_db"] = r.snr_db;
    return j;
}

json row_to_json(const ReportRow& r) {
    return json{{"method", r.method},
                {"scenario", r.scenario},
                {"profile", profile_name(r.profile)},
                {"n_r", r.n_r},
                {"n_fp", r.n_fp},
                {"n_sp", r.n_sp},
                {"snr", r.snr},
                {"n_seeds", r.n_seeds},
                {"mean_mse", r.mean_mse},
                {"ci95_half", r.ci95_half},
                {"gain_db", std::isnan(r.gain_db) ? json(nullptr) : json(r.gain_db)},
                {"norm_score", std::isnan(r.norm_score) ? json(nullptr) : json(r.norm_score)}};
}

}  // namespace

void write_report_json(const BenchReport& report, const std::string& path) {
    json j;
    j["schema_version"] = report.schema_version;
    j["suite"] = report.suite;
    j["seeds"] = report.seeds;
    j["partial"] = report.partial;
    j["dataset_hashes"] = report.dataset_hashes;
    j["config"] = json::parse(report.config_echo);
    json scen = json::array();
    for (const auto& c : report.scenarios)
        scen.push_back({{"label", c.label()},
                        {"profile", profile_name(c.profile)},
                        {"n_r", c.n_r},
                        {"n_fp", c.n_fp},
                        {"n_sp", c.n_sp},
                        {"speed_domain", c.speed_domain}});
    j["scenarios"] = scen;
    json recs = json::array();
    for (const auto& r : report.records) recs.push_back(record_to_json(r));
    j["records"] = recs;
    json rows = json::array();
    for (const auto& r : report.rows()) rows.push_back(row_to_json(r));
    j["rows"] = rows;
    json fails = json::array();
    for (const auto& f : report.failures)
        fails.push_back(
            {{"method", f.method}, {"scenario", f.scenario}, {"seed", f.seed}, {"error", f.error}});
    j["failures"] = fails;

    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os << j.dump(2) << "\n";
}

void write_report_csv(const BenchReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("report: cannot open " + path);
    os << "suite,method,scenario,profile,n_r,n_fp,n_sp,snr,n_seeds,mean_mse,ci95_half,gain_db,"
          "norm_score\n";
    for (const auto& r : report.rows()) {
        os << report.suite << "," << r.method << "," << r.scenario << ","
           << profile_name(r.profile) << "," << r.n_r << "," << r.n_fp << "," << r.n_sp << ","
           << r.snr << "," << r.n_seeds << "," << fmt(r.mean_mse) << "," << fmt(r.ci95_half) << ","
           << (std::isnan(r.gain_db) ? "" : fmt(r.gain_db)) << ","
           << (std::isnan(r.norm_score) ? "" : fmt(r.norm_score)) << "\n";
    }
}

std::string report_markdown(const BenchReport& report) {
    std::string md = "| method | scenario | snr | seeds | mean mse | ci95 | gain dB | score |\n"
                     "|---|---|---|---|---|---|---|---|\n";
    for (const auto& r : report.rows()) {
        md += "| " + r.method + " | " + r.scenario + " | " + r.snr + " | " +
              std::to_string(r.n_seeds) + " | " + fmt(r.mean_mse) + " | " + fmt(r.ci95_half) +
              " | " + (std::isnan(r.gain_db) ? std::string("-") : fmt(r.gain_db)) + " | " +
              (std::isnan(r.norm_score) ? std::string("-") : fmt(r.norm_score)) + " |\n";
    }
    return md;
}

BenchReport read_report_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("report: cannot open " + path);
    json j = json::parse(is);
    BenchReport report;
    report.schema_version = j.at("schema_version").get<int>();
    if (report.schema_version != 1) throw std::runtime_error("report: unsupported schema version");
    report.suite = j.at("suite").get<std::string>();
    report.seeds = j.at("seeds").get<std::vector<int>>();
    report.partial = j.at("partial").get<bool>();
    report.config_echo = j.at("config").dump();
    for (const auto& [k, v] : j.at("dataset_hashes").items())
        report.dataset_hashes[k] = v.get<std::string>();
    for (const auto& s : j.at("scenarios")) {
        ScenarioCell c;
        c.profile = profile_from_name(s.at("profile").get<std::string>());
        c.n_r = s.at("n_r").get<int>();
        c.n_fp = s.at("n_fp").get<int>();
        c.n_sp = s.at("n_sp").get<int>();
        c.speed_domain = s.at("speed_domain").get<std::vector<double>>();
        report.scenarios.push_back(c);
    }
    for (const auto& r : j.at("records")) {
        EvalRecord rec;
        rec.method = r.at("method").get<std::string>();
        rec.scenario = r.at("scenario").get<std::string>();
        rec.seed = r.at("seed").get<int>();
        rec.snr_db = r.at("snr_db").is_null() ? std::nan("") : r.at("snr_db").get<double>();
        rec.mse = r.at("mse").get<double>();
        rec.samples = r.at("samples").get<long>();
        report.records.push_back(std::move(rec));
    }
    for (const auto& f : j.at("failures"))
        report.failures.push_back({f.at("method").get<std::string>(),
                                   f.at("scenario").get<std::string>(), f.at("seed").get<int>(),
                                   f.at("error").get<std::string>()});
    return report;
}

std::string config_to_json(const BenchConfig& cfg) {
    json j;
    j["n_samples"] = cfg.n_samples;
    j["ood_eval_samples"] = cfg.ood_eval_samples;
    j["n_seeds"] = cfg.n_seeds;
    j["base_seed"] = std::to_string(cfg.base_seed);
    std::vector<std::string> profiles;
    for (Profile p : cfg.profiles) profiles.push_back(profile_name(p));
    j["profiles"] = profiles;
    j["n_r_list"] = cfg.n_r_list;
    j["snr_domain"] = cfg.snr_domain;
    j["speed_domain"] = cfg.speed_domain;
    j["ood_snr_domain"] = cfg.ood_snr_domain;
    j["almmse_rank_div"] = cfg.almmse_rank_div;
    j["eval_batch"] = cfg.eval_batch;
    j["jobs"] = cfg.jobs;
    j["train"] = {{"initial_lr", cfg.tcfg.initial_lr},
                  {"batch_size", cfg.tcfg.batch_size},
                  {"plateau_patience", cfg.tcfg.plateau_patience},
                  {"plateau_factor", cfg.tcfg.plateau_factor},
                  {"min_lr", cfg.tcfg.min_lr},
                  {"early_stop_patience", cfg.tcfg.early_stop_patience},
                  {"max_epochs", cfg.tcfg.max_epochs},
                  {"seed", std::to_string(cfg.tcfg.seed)}};
    return j.dump(2);
}

}  // namespace cebed::bench
