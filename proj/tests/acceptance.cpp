// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors
//
// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line
// with the measured values; the process exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cebed/channel.hpp"
#include "cebed/classical.hpp"
#include "cebed/dataset.hpp"
#include "cebed/evalbench.hpp"
#include "cebed/models.hpp"
#include "cebed/train.hpp"
#include "testutil.hpp"

using namespace cebed;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 20260810;

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& msg) {
    if (!ok) throw Failure(msg);
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// Ordering with a 0.1% tie band: the 8-tap surrogate channel makes the
// rank-limited filter numerically equal to the full one, so exact <=
// would hinge on rounding noise.
bool ordered(double lo, double hi) { return lo <= hi * 1.001 + 1e-12; }

// ---- shared desk-scale artifacts (criterion 3 feeds 7 and 8) ---------

struct DeskBench {
    data::Dataset dataset;
    data::Split split;
    est::ChannelStats stats;
    pilots::PilotPattern geometry;
    std::map<double, double> ls_by_snr, lmmse_by_snr, almmse_by_snr;
    double ls_all = 0, lmmse_all = 0, almmse_all = 0;
};

DeskBench build_desk_bench() {
    DeskBench b;
    data::DatasetFamily family;  // umi-like, n_r 1, 72/2, SNR {0..20}, speed {0..15}
    b.dataset = data::generate(family, 2000, kMasterSeed, 2);
    b.split = data::split_dataset(b.dataset, derive_seed(kMasterSeed, "split", 0));
    b.geometry = pilots::block_pattern(family.dims, family.n_fp, family.n_sp, 0);

    est::StatsAccumulator acc(b.geometry);
    for (int idx : b.split.train) acc.add(b.dataset.channel(idx));
    b.stats = acc.finalize();

    std::map<double, std::pair<double, long>> ls, lm, al;
    for (int idx : b.split.test) {
        const est::PilotObservation obs = b.dataset.observation(idx);
        const ComplexGrid truth = b.dataset.channel(idx);
        const double snr = b.dataset.snr_db[idx];
        const ComplexGrid ls_grid =
            est::interpolate_linear(est::ls_pilot(obs), obs.pattern, obs.pattern.dims);
        auto& s0 = ls[snr];
        s0.first += bench::mse(ls_grid, truth);
        s0.second += 1;
        auto& s1 = lm[snr];
        s1.first += bench::mse(est::lmmse_2d(obs, b.stats), truth);
        s1.second += 1;
        auto& s2 = al[snr];
        s2.first += bench::mse(est::almmse(obs, b.stats, 72 / 4), truth);
        s2.second += 1;
    }
    double n = 0;
    for (auto& [snr, acc2] : ls) {
        b.ls_by_snr[snr] = acc2.first / acc2.second;
        b.lmmse_by_snr[snr] = lm[snr].first / lm[snr].second;
        b.almmse_by_snr[snr] = al[snr].first / al[snr].second;
        b.ls_all += acc2.first;
        b.lmmse_all += lm[snr].first;
        b.almmse_all += al[snr].first;
        n += acc2.second;
    }
    b.ls_all /= n;
    b.lmmse_all /= n;
    b.almmse_all /= n;
    return b;
}

std::optional<DeskBench> g_bench;

// Per-SNR evaluation of a trained model on the shared test split.
std::map<double, double> eval_model_by_snr(const zoo::Model& model, const DeskBench& b) {
    std::vector<nn::Tensor> inputs;
    inputs.reserve(b.split.test.size());
    for (int idx : b.split.test)
        inputs.push_back(zoo::input_adapter(b.dataset.observation(idx), model.spec().input_kind()));
    const std::vector<nn::Tensor> outs = zoo::estimate_batch(model, inputs, 256);
    std::map<double, std::pair<double, long>> acc;
    for (std::size_t i = 0; i < outs.size(); ++i) {
        const int idx = b.split.test[i];
        auto& slot = acc[b.dataset.snr_db[idx]];
        slot.first += bench::mse(zoo::planes_to_grid(outs[i]), b.dataset.channel(idx));
        slot.second += 1;
    }
    std::map<double, double> out;
    for (auto& [snr, s] : acc) out[snr] = s.first / s.second;
    return out;
}

zoo::Model train_desk_model(zoo::ModelName name, const DeskBench& b) {
    const ScenarioSpec sc{Profile::UmiLike, 1, 72, 2, 10.0, 5.0};
    zoo::Model model(zoo::ModelSpec::defaults(name, sc),
                     derive_seed(kMasterSeed, "init", static_cast<int>(name)));
    const auto kind = model.spec().input_kind();
    train::TensorDataset train_split, val_split;
    for (int idx : b.split.train) {
        train_split.inputs.push_back(zoo::input_adapter(b.dataset.observation(idx), kind));
        train_split.targets.push_back(zoo::grid_to_planes(b.dataset.channel(idx)));
    }
    for (int idx : b.split.val) {
        val_split.inputs.push_back(zoo::input_adapter(b.dataset.observation(idx), kind));
        val_split.targets.push_back(zoo::grid_to_planes(b.dataset.channel(idx)));
    }
    train::TrainConfig cfg;
    cfg.batch_size = 256;
    cfg.max_epochs = 30;
    cfg.seed = derive_seed(kMasterSeed, "train", static_cast<int>(name));
    train::fit(model, train_split, val_split, cfg);
    return model;
}

std::map<std::string, std::map<double, double>> g_model_by_snr;
std::map<std::string, double> g_model_all;
std::optional<zoo::Model> g_trained_reesnet;

// ---- criteria ---------------------------------------------------------

std::string c1_ls_oracle() {
    std::ostringstream detail;
    for (double sigma2 : {1.0, 0.1, 0.01}) {
        const pilots::PilotPattern pat = pilots::block_pattern(GridDims{72, 14}, 72, 2, 3);
        const ScenarioSpec sc{Profile::UmiLike, 1, 72, 2, 10.0, 5.0};
        const channel::ChannelProfile prof = channel::profile_preset(Profile::UmiLike);
        double err = 0;
        std::size_t cells = 0;
        for (int k = 0; k < 700; ++k) {
            const ComplexGrid h = channel::sample_channel(sc, prof, 50000 + k).grid;
            const ComplexGrid hp = pilots::extract(h, pat);
            const pilots::PilotPattern vals =
                pilots::block_pattern(GridDims{72, 14}, 72, 2, 60000 + k);
            ComplexGrid xp(GridDims{72, 2}, 1);
            ComplexGrid yp(GridDims{72, 2}, 1);
            Rng rng(70000 + k);
            for (int pf = 0; pf < 72; ++pf)
                for (int ps = 0; ps < 2; ++ps) {
                    xp.at(0, pf, ps) = vals.value(pf, ps);
                    yp.at(0, pf, ps) =
                        hp.at(0, pf, ps) * xp.at(0, pf, ps) + std::sqrt(sigma2) * rng.cgaussian();
                }
            const est::PilotObservation obs{yp, xp, pat, sigma2};
            const ComplexGrid ls = est::ls_pilot(obs);
            for (std::size_t i = 0; i < ls.data().size(); ++i)
                err += std::norm(ls.data()[i] - hp.data()[i]);
            cells += ls.data().size();
        }
        const double measured = err / static_cast<double>(cells);
        expect(cells >= 100000, "need at least 1e5 cells");
        expect(std::abs(measured - sigma2) <= 0.03 * sigma2,
               "sigma2 " + fmt(sigma2) + ": measured " + fmt(measured));
        detail << " s2=" << fmt(sigma2) << "->" << fmt(measured);
    }
    return "pilot-cell MSE within 3% of sigma^2:" + detail.str();
}

std::string c2_lmmse_oracle() {
    Rng rng(55);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n_f = 4;
        const int n_fp = (trial % 2 == 0) ? 4 : 2;
        const pilots::PilotPattern pat =
            pilots::block_pattern(GridDims{n_f, 14}, n_fp, 1, 200 + trial);
        const testutil::CMat a = testutil::random_factor(n_f, rng);
        const testutil::CMat sigma = testutil::matmul(a, testutil::adjoint(a));
        testutil::CMat g(n_f, 1);
        for (cd& x : g.v) x = rng.cgaussian();
        const testutil::CMat h = testutil::matmul(a, g);
        const double sigma2 = 0.05 + 0.4 * rng.uniform();

        est::ChannelStats stats;
        stats.sample_count = 1 << 20;
        stats.r_auto = Eigen::MatrixXcd(n_fp, n_fp);
        Eigen::MatrixXcd cross(n_f, n_fp);
        for (int i = 0; i < n_f; ++i)
            for (int j = 0; j < n_fp; ++j)
                cross(i, j) = sigma.at(i, pat.subcarrier_positions[j]);
        for (int i = 0; i < n_fp; ++i)
            for (int j = 0; j < n_fp; ++j)
                stats.r_auto(i, j) =
                    sigma.at(pat.subcarrier_positions[i], pat.subcarrier_positions[j]);
        stats.r_cross.push_back(cross);

        ComplexGrid ygrid(GridDims{n_fp, 1}, 1), xgrid(GridDims{n_fp, 1}, 1);
        testutil::CMat y(n_fp, 1);
        for (int j = 0; j < n_fp; ++j) {
            const cd x = pat.value(j, 0);
            xgrid.at(0, j, 0) = x;
            ygrid.at(0, j, 0) =
                h.at(pat.subcarrier_positions[j], 0) * x + std::sqrt(sigma2) * rng.cgaussian();
            y.at(j, 0) = ygrid.at(0, j, 0) / x;
        }
        const est::PilotObservation obs{ygrid, xgrid, pat, sigma2};

        testutil::CMat app(n_fp, n_fp);
        for (int i = 0; i < n_fp; ++i)
            for (int j = 0; j < n_fp; ++j) {
                app.at(i, j) = stats.r_auto(i, j);
                if (i == j) app.at(i, j) += sigma2;
            }
        testutil::CMat cr(n_f, n_fp);
        for (int i = 0; i < n_f; ++i)
            for (int j = 0; j < n_fp; ++j) cr.at(i, j) = cross(i, j);
        const testutil::CMat want =
            testutil::matmul(cr, testutil::matmul(testutil::invert(app), y));

        const ComplexGrid got = est::lmmse_fd(obs, stats);
        double num = 0, den = 0;
        for (int i = 0; i < n_f; ++i) {
            num += std::norm(got.at(0, i, 0) - want.at(i, 0));
            den += std::norm(want.at(i, 0));
        }
        worst = std::max(worst, std::sqrt(num / den));
    }
    expect(worst < 1e-8, "worst relative error " + fmt(worst));
    return "100 conditional-mean toys, worst rel err " + fmt(worst);
}

std::string c3_classical_ordering() {
    g_bench = build_desk_bench();
    const DeskBench& b = *g_bench;
    std::ostringstream detail;
    for (const auto& [snr, ls] : b.ls_by_snr) {
        const double lmmse = b.lmmse_by_snr.at(snr);
        const double almmse = b.almmse_by_snr.at(snr);
        expect(ordered(lmmse, almmse) && ordered(almmse, ls),
               "ordering violated at " + fmt(snr) + " dB: " + fmt(lmmse) + " / " + fmt(almmse) +
                   " / " + fmt(ls));
        detail << " " << snr << "dB:" << fmt(lmmse) << "<=" << fmt(almmse) << "<=" << fmt(ls);
    }
    return "LMMSE<=ALMMSE<=LS at every SNR:" + detail.str();
}

std::string c4_gain_formula() {
    const double g1 = bench::gain_db(0.24, 0.017);
    const double g2 = bench::gain_db(152.81, 0.39);
    expect(std::abs(g1 - 11.47) <= 0.15, "gain(0.24, 0.017) = " + fmt(g1));
    expect(std::abs(g2 - 25.92) <= 0.15, "gain(152.81, 0.39) = " + fmt(g2));
    return "gain(0.24,0.017)=" + fmt(g1) + " dB, gain(152.81,0.39)=" + fmt(g2) + " dB";
}

std::string c5_gradient_checks() {
    using testutil::DTape;
    using testutil::DTensor;
    Rng rng(9);
    auto randn = [&](std::vector<int> shape, double scale = 1.0) {
        DTensor t(std::move(shape));
        for (double& x : t.v) {
            x = scale * rng.gaussian();
            if (std::abs(x) < 0.05) x += x < 0 ? -0.1 : 0.1;
        }
        return t;
    };
    double worst = 0.0;
    auto check = [&](const char* name, std::vector<DTensor> params,
                     const testutil::GraphBuilder& build) {
        const double err = testutil::gradcheck(std::move(params), build);
        worst = std::max(worst, err);
        expect(err < 1e-6, std::string(name) + " rel err " + fmt(err));
    };

    const DTensor t_dense = randn({3, 5});
    check("dense", {randn({3, 4}), randn({4, 5}), randn({5})},
          [&](DTape& t, const std::vector<int>& p) {
              return t.mse_loss(t.dense(p[0], p[1], p[2]), t.input(t_dense));
          });
    const DTensor t_conv = randn({2, 4, 5, 3});
    check("conv2d", {randn({2, 4, 5, 2}), randn({3, 3, 2, 3}, 0.5), randn({3})},
          [&](DTape& t, const std::vector<int>& p) {
              return t.mse_loss(t.conv2d(p[0], p[1], p[2]), t.input(t_conv));
          });
    const DTensor t_tconv = randn({1, 3, 4, 2});
    check("conv2d_transpose", {randn({1, 3, 2, 2}), randn({3, 4, 2, 2}, 0.5), randn({2})},
          [&](DTape& t, const std::vector<int>& p) {
              return t.mse_loss(t.conv2d_transpose(p[0], p[1], p[2], 1, 2), t.input(t_tconv));
          });
    const DTensor t_up = randn({1, 6, 8, 2});
    check("bilinear_upsample", {randn({1, 3, 4, 2})}, [&](DTape& t, const std::vector<int>& p) {
        return t.mse_loss(t.bilinear_upsample(p[0], 6, 8), t.input(t_up));
    });
    const DTensor t_relu = randn({4, 6});
    check("relu", {randn({4, 6})}, [&](DTape& t, const std::vector<int>& p) {
        return t.mse_loss(t.relu(p[0]), t.input(t_relu));
    });
    const DTensor t_ln = randn({2, 3, 6});
    check("layer_norm", {randn({2, 3, 6}), randn({6}, 0.3), randn({6}, 0.1)},
          [&](DTape& t, const std::vector<int>& p) {
              return t.mse_loss(t.layer_norm(p[0], p[1], p[2]), t.input(t_ln));
          });
    const DTensor t_sm = randn({3, 5}, 0.3);
    check("softmax", {randn({3, 5})}, [&](DTape& t, const std::vector<int>& p) {
        return t.mse_loss(t.softmax(p[0]), t.input(t_sm));
    });
    const DTensor t_att = randn({2, 3, 4});
    check("scaled_dot_attention",
          {randn({2, 3, 4}), randn({2, 3, 4}), randn({2, 3, 4})},
          [&](DTape& t, const std::vector<int>& p) {
              return t.mse_loss(t.scaled_dot_attention(p[0], p[1], p[2], 2), t.input(t_att));
          });
    const DTensor t_add = randn({2, 6});
    check("residual_add+reshape", {randn({2, 3, 2}), randn({2, 3, 2})},
          [&](DTape& t, const std::vector<int>& p) {
              return t.mse_loss(t.reshape(t.residual_add(p[0], p[1]), {2, 6}), t.input(t_add));
          });
    check("mse_loss", {randn({7}), randn({7})},
          [&](DTape& t, const std::vector<int>& p) { return t.mse_loss(p[0], p[1]); });
    return "all primitives, worst rel err " + fmt(worst);
}

std::string c6_score_identities() {
    expect(bench::normalized_score(0.004, 0.24, 0.004) == 100.0, "score(LMMSE) != 100");
    expect(bench::normalized_score(0.24, 0.24, 0.004) == 0.0, "score(LS) != 0");
    expect(bench::normalized_score(0.122, 0.24, 0.004) == 50.0, "midpoint != 50");
    expect(bench::normalized_score(1.5, 0.24, 0.004) == 0.0, "no clamp below LS");
    return "score identities exact (100 / 0 / 50 / clamp)";
}

std::string c7_desk_training() {
    expect(g_bench.has_value(), "criterion 3 must run first");
    const DeskBench& b = *g_bench;
    std::ostringstream detail;
    for (zoo::ModelName name : {zoo::ModelName::DDAE, zoo::ModelName::ReEsNet}) {
        const zoo::Model model = train_desk_model(name, b);
        if (name == zoo::ModelName::ReEsNet) g_trained_reesnet = model;
        const std::map<double, double> by_snr = eval_model_by_snr(model, b);
        double all = 0;
        for (const auto& [snr, m] : by_snr) all += m;
        all /= static_cast<double>(by_snr.size());
        g_model_by_snr[zoo::model_name_str(name)] = by_snr;
        g_model_all[zoo::model_name_str(name)] = all;

        const double gain = bench::gain_db(b.ls_all, all);
        const double score10 =
            bench::normalized_score(by_snr.at(10.0), b.ls_by_snr.at(10.0), b.lmmse_by_snr.at(10.0));
        expect(gain >= 6.0, std::string(zoo::model_name_str(name)) + " gain " + fmt(gain) + " dB");
        expect(score10 > 50.0,
               std::string(zoo::model_name_str(name)) + " score@10dB " + fmt(score10));
        detail << " " << zoo::model_name_str(name) << ": gain=" << fmt(gain)
               << "dB score@10dB=" << fmt(score10);
    }
    return "deep models land between LS and LMMSE:" + detail.str();
}

std::string c8_ood_degradation() {
    expect(g_bench.has_value() && g_trained_reesnet.has_value(), "criterion 7 must run first");
    const DeskBench& b = *g_bench;

    // in-distribution score at 20 dB from the criterion-7 evaluation
    const double score20 = bench::normalized_score(g_model_by_snr["ReEsNet"].at(20.0),
                                                   b.ls_by_snr.at(20.0), b.lmmse_by_snr.at(20.0));

    // fresh evaluation set at 30 dB only
    data::DatasetFamily fam;
    fam.snr_domain = {30.0};
    const data::Dataset ood = data::generate(fam, 400, derive_seed(kMasterSeed, "ood", 0), 2);
    const zoo::Model& trained = *g_trained_reesnet;

    double m_ls = 0, m_lmmse = 0, m_nn = 0;
    std::vector<nn::Tensor> inputs;
    for (int i = 0; i < ood.n_samples; ++i) {
        const est::PilotObservation obs = ood.observation(i);
        const ComplexGrid truth = ood.channel(i);
        m_ls += bench::mse(est::interpolate_linear(est::ls_pilot(obs), obs.pattern, obs.pattern.dims),
                           truth);
        m_lmmse += bench::mse(est::lmmse_2d(obs, b.stats), truth);
        inputs.push_back(zoo::input_adapter(obs, trained.spec().input_kind()));
    }
    const std::vector<nn::Tensor> outs = zoo::estimate_batch(trained, inputs, 256);
    for (int i = 0; i < ood.n_samples; ++i)
        m_nn += bench::mse(zoo::planes_to_grid(outs[i]), ood.channel(i));
    m_ls /= ood.n_samples;
    m_lmmse /= ood.n_samples;
    m_nn /= ood.n_samples;

    const double score30 = bench::normalized_score(m_nn, m_ls, m_lmmse);
    // unclamped ratios shown for context when the clamp saturates both scores
    const double raw20 = 100.0 *
                         (g_model_by_snr["ReEsNet"].at(20.0) - b.ls_by_snr.at(20.0)) /
                         (b.lmmse_by_snr.at(20.0) - b.ls_by_snr.at(20.0));
    const double raw30 = 100.0 * (m_nn - m_ls) / (m_lmmse - m_ls);
    expect(score20 - score30 >= 20.0, "score@20dB " + fmt(score20) + " vs score@30dB " +
                                          fmt(score30) + " (unclamped " + fmt(raw20) + " vs " +
                                          fmt(raw30) + ")");
    return "ReEsNet score@20dB=" + fmt(score20) + " drops to score@30dB=" + fmt(score30) +
           " (unclamped " + fmt(raw20) + " vs " + fmt(raw30) + ")";
}

std::string c9_schedule_protocol() {
    train::PlateauScheduler sched(1e-3, 0.5, 3, 1e-5);
    expect(sched.observe(1.0) == 1e-3, "first epoch must keep lr");
    expect(sched.observe(1.0) == 1e-3, "one stagnant epoch must keep lr");
    expect(sched.observe(1.0) == 1e-3, "two stagnant epochs must keep lr");
    expect(sched.observe(1.0) == 5e-4, "third stagnant epoch must halve lr");
    for (int i = 0; i < 60; ++i) sched.observe(1.0);
    expect(sched.lr() == 1e-5, "lr must floor at 1e-5, got " + fmt(sched.lr()));

    train::EarlyStopper stop(10);
    expect(!stop.observe(0.5), "first epoch sets the best");
    for (int i = 1; i <= 9; ++i)
        expect(!stop.observe(0.5), "must not stop before 10 stagnant epochs");
    expect(stop.observe(0.5), "must stop exactly at the 10th stagnant epoch");
    return "halving after 3 stagnant epochs, floor 1e-5, stop after 10";
}

std::string c10_reproducibility() {
    const fs::path root = fs::temp_directory_path() / "cebed_acceptance_repro";
    fs::remove_all(root);
    fs::create_directories(root);

    auto run_once = [&](const fs::path& dir) {
        data::DatasetFamily fam;
        fam.snr_domain = {0, 10, 20};
        data::Dataset d = data::generate(fam, 120, 4242, 2);
        data::split_dataset(d, 17);
        data::save(d, (dir / "ds").string());

        bench::BenchConfig cfg;
        cfg.n_samples = 120;
        cfg.n_seeds = 1;
        cfg.base_seed = 4242;
        cfg.profiles = {Profile::UmiLike};
        cfg.n_r_list = {1};
        cfg.tcfg.max_epochs = 2;
        cfg.tcfg.batch_size = 32;
        const bench::BenchReport report = bench::run_suite("accuracy", {"DDAE"}, cfg);
        expect(!report.partial, "desk run must not be partial");
        bench::write_report_csv(report, (dir / "report.csv").string());
        bench::write_report_json(report, (dir / "report.json").string());
    };
    run_once(root / "a");
    run_once(root / "b");

    auto bytes = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(is), {});
    };
    for (const char* f : {"ds/h_true.bin", "ds/y_p.bin", "ds/x_p.bin", "ds/snr_db.bin",
                          "ds/speed_mps.bin", "ds/manifest.json", "report.csv", "report.json"}) {
        const std::string a = bytes(root / "a" / f);
        const std::string b = bytes(root / "b" / f);
        expect(!a.empty() && a == b, std::string(f) + " differs between runs");
    }
    fs::remove_all(root);
    return "dataset blobs and metric tables byte-identical across reruns";
}

struct Criterion {
    int id;
    const char* title;
    double budget_seconds;
    std::function<std::string()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "LS analytic oracle", 10, c1_ls_oracle},
        {2, "LMMSE conditional-mean equivalence", 5, c2_lmmse_oracle},
        {3, "classical MSE ordering", 120, c3_classical_ordering},
        {4, "gain formula consistency", 5, c4_gain_formula},
        {5, "gradient checks", 30, c5_gradient_checks},
        {6, "normalized-score identities", 5, c6_score_identities},
        {7, "desk-scale deep training", 1800, c7_desk_training},
        {8, "OOD degradation", 300, c8_ood_degradation},
        {9, "scheduler and early-stop protocol", 5, c9_schedule_protocol},
        {10, "end-to-end reproducibility", 300, c10_reproducibility},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (pass && secs > c.budget_seconds) {
            pass = false;
            detail = "runtime " + fmt(secs) + "s exceeds " + fmt(c.budget_seconds) + "s: " + detail;
        }
        std::printf("[%s] criterion %2d: %s (%.1fs) -- %s\n", pass ? "PASS" : "FAIL", c.id,
                    c.title, secs, detail.c_str());
        std::fflush(stdout);
        failures += !pass;
    }
    if (failures) std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
