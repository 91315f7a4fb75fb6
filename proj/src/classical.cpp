// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/classical.hpp"

#include <stdexcept>

namespace cebed::est {

void PilotObservation::validate() const {
    if (y_p.dims().n_f != pattern.n_fp || y_p.dims().n_s != pattern.n_sp)
        throw std::invalid_argument("PilotObservation: y_p shape does not match pattern");
    if (x_p.antennas() != 1 || x_p.dims().n_f != pattern.n_fp || x_p.dims().n_s != pattern.n_sp)
        throw std::invalid_argument("PilotObservation: x_p shape does not match pattern");
    if (sigma2 < 0.0) throw std::invalid_argument("PilotObservation: sigma2 must be >= 0");
}

ComplexGrid ls_pilot(const PilotObservation& obs) {
    obs.validate();
    ComplexGrid out(obs.y_p.dims(), obs.y_p.antennas());
    for (int pf = 0; pf < obs.pattern.n_fp; ++pf)
        for (int ps = 0; ps < obs.pattern.n_sp; ++ps) {
            const cd x = obs.x_p.at(0, pf, ps);
            if (std::norm(x) == 0.0) throw std::invalid_argument("ls_pilot: zero pilot value");
            for (int a = 0; a < obs.y_p.antennas(); ++a)
                out.at(a, pf, ps) = obs.y_p.at(a, pf, ps) / x;
        }
    return out;
}

ComplexGrid interpolate_time(const ComplexGrid& per_symbol, const std::vector<int>& symbol_positions,
                             GridDims dims) {
    const int n_sp = static_cast<int>(symbol_positions.size());
    if (per_symbol.dims().n_s != n_sp)
        throw std::invalid_argument("interpolate_time: symbol count mismatch");
    ComplexGrid out(dims, per_symbol.antennas());
    for (int a = 0; a < per_symbol.antennas(); ++a)
        for (int f = 0; f < dims.n_f; ++f) {
            if (n_sp == 1) {
                const cd v = per_symbol.at(a, f, 0);
                for (int s = 0; s < dims.n_s; ++s) out.at(a, f, s) = v;
            } else {
                const int s0 = symbol_positions.front();
                const int s1 = symbol_positions.back();
                const cd v0 = per_symbol.at(a, f, 0);
                const cd v1 = per_symbol.at(a, f, n_sp - 1);
                for (int s = 0; s < dims.n_s; ++s) {
                    const double w = static_cast<double>(s - s0) / static_cast<double>(s1 - s0);
                    out.at(a, f, s) = (1.0 - w) * v0 + w * v1;
                }
            }
        }
    return out;
}

ComplexGrid interpolate_linear(const ComplexGrid& h_p, const pilots::PilotPattern& pattern,
                               GridDims dims) {
    if (h_p.dims().n_f != pattern.n_fp || h_p.dims().n_s != pattern.n_sp)
        throw std::invalid_argument("interpolate_linear: estimate shape does not match pattern");

    const int stride = dims.n_f / pattern.n_fp;
    ComplexGrid freq(GridDims{dims.n_f, pattern.n_sp}, h_p.antennas());
    for (int a = 0; a < h_p.antennas(); ++a)
        for (int ps = 0; ps < pattern.n_sp; ++ps)
            for (int f = 0; f < dims.n_f; ++f) {
                const int last = pattern.n_fp - 1;
                if (f >= pattern.subcarrier_positions[last]) {
                    // at or beyond the last pilot subcarrier: nearest value
                    freq.at(a, f, ps) = h_p.at(a, last, ps);
                    continue;
                }
                const int i = f / stride;
                const double w =
                    static_cast<double>(f - pattern.subcarrier_positions[i]) / stride;
                freq.at(a, f, ps) =
                    (1.0 - w) * h_p.at(a, i, ps) + w * h_p.at(a, i + 1, ps);
            }
    return interpolate_time(freq, pattern.symbol_positions, dims);
}

StatsAccumulator::StatsAccumulator(const pilots::PilotPattern& pattern) : pattern_(pattern) {
    cross_.assign(pattern.n_sp, Eigen::MatrixXcd::Zero(pattern.dims.n_f, pattern.n_fp));
    auto_ = Eigen::MatrixXcd::Zero(pattern.n_fp, pattern.n_fp);
}

void StatsAccumulator::add(const ComplexGrid& channel) {
    if (!(channel.dims() == pattern_.dims))
        throw std::invalid_argument("estimate_stats: channel dims do not match pattern");
    const int n_f = pattern_.dims.n_f;
    Eigen::VectorXcd h(n_f), hp(pattern_.n_fp);
    for (int a = 0; a < channel.antennas(); ++a) {
        for (int i = 0; i < pattern_.n_sp; ++i) {
            const int sym = pattern_.symbol_positions[i];
            for (int f = 0; f < n_f; ++f) h(f) = channel.at(a, f, sym);
            for (int pf = 0; pf < pattern_.n_fp; ++pf)
                hp(pf) = h(pattern_.subcarrier_positions[pf]);
            cross_[i].noalias() += h * hp.adjoint();
            auto_.noalias() += hp * hp.adjoint();
        }
        ++count_;
    }
}

ChannelStats StatsAccumulator::finalize() const {
    if (count_ < pattern_.n_fp)
        throw std::invalid_argument("estimate_stats: need at least n_fp samples");
    ChannelStats stats;
    stats.sample_count = count_;
    const double inv = 1.0 / static_cast<double>(count_);
    stats.r_cross.reserve(cross_.size());
    for (const auto& c : cross_) stats.r_cross.push_back(c * inv);
    Eigen::MatrixXcd pooled = auto_ * (inv / static_cast<double>(pattern_.n_sp));
    stats.r_auto = 0.5 * (pooled + pooled.adjoint());
    return stats;
}

ChannelStats estimate_stats(const std::vector<ComplexGrid>& channels,
                            const pilots::PilotPattern& pattern) {
    StatsAccumulator acc(pattern);
    for (const auto& c : channels) acc.add(c);
    return acc.finalize();
}

namespace {

void check_stats(const ChannelStats& stats, const pilots::PilotPattern& pattern) {
    if (static_cast<int>(stats.r_cross.size()) != pattern.n_sp)
        throw std::invalid_argument("lmmse: stats pilot-symbol count does not match pattern");
    if (stats.r_auto.rows() != pattern.n_fp || stats.r_auto.cols() != pattern.n_fp)
        throw std::invalid_argument("lmmse: r_auto shape does not match pattern");
    for (const auto& c : stats.r_cross)
        if (c.rows() != pattern.dims.n_f || c.cols() != pattern.n_fp)
            throw std::invalid_argument("lmmse: r_cross shape does not match pattern");
}

double ridge_term(const ChannelStats& stats) {
    return 1e-10 * stats.r_auto.real().trace() / static_cast<double>(stats.r_auto.rows());
}

// Applies per-pilot-symbol filters to the LS pilot estimates.
ComplexGrid apply_filter(const PilotObservation& obs, const std::vector<Eigen::MatrixXcd>& filters) {
    const ComplexGrid hls = ls_pilot(obs);
    const int n_f = obs.pattern.dims.n_f;
    ComplexGrid out(GridDims{n_f, obs.pattern.n_sp}, hls.antennas());
    Eigen::VectorXcd in(obs.pattern.n_fp);
    for (int a = 0; a < hls.antennas(); ++a)
        for (int i = 0; i < obs.pattern.n_sp; ++i) {
            for (int pf = 0; pf < obs.pattern.n_fp; ++pf) in(pf) = hls.at(a, pf, i);
            const Eigen::VectorXcd est = filters[i] * in;
            for (int f = 0; f < n_f; ++f) out.at(a, f, i) = est(f);
        }
    return out;
}

}  // namespace

LmmseFilter build_lmmse_filter(const ChannelStats& stats, double sigma2) {
    Eigen::MatrixXcd a = stats.r_auto;
    a.diagonal().array() += cd{sigma2 + ridge_term(stats), 0.0};
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("lmmse: singular pilot auto-correlation");
    LmmseFilter filt;
    filt.f.reserve(stats.r_cross.size());
    for (const auto& cross : stats.r_cross)
        filt.f.push_back(ldlt.solve(cross.adjoint()).adjoint());
    for (const auto& f : filt.f)
        if (!f.allFinite()) throw std::runtime_error("lmmse: non-finite filter");
    return filt;
}

ComplexGrid lmmse_fd(const PilotObservation& obs, const ChannelStats& stats) {
    obs.validate();
    check_stats(stats, obs.pattern);
    return apply_filter(obs, build_lmmse_filter(stats, obs.sigma2).f);
}

ComplexGrid lmmse_2d(const PilotObservation& obs, const ChannelStats& stats) {
    return interpolate_time(lmmse_fd(obs, stats), obs.pattern.symbol_positions, obs.pattern.dims);
}

ComplexGrid almmse(const PilotObservation& obs, const ChannelStats& stats, int rank) {
    obs.validate();
    check_stats(stats, obs.pattern);
    if (rank < 1 || rank > obs.pattern.n_fp) throw std::invalid_argument("almmse: invalid rank");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(stats.r_auto);
    if (eig.info() != Eigen::Success) throw std::runtime_error("almmse: eigendecomposition failed");

    // Eigenvalues come back ascending; keep the trailing `rank` pairs.
    const auto n_fp = stats.r_auto.rows();
    const Eigen::MatrixXcd basis = eig.eigenvectors().rightCols(rank);
    Eigen::VectorXd inv_gain(rank);
    const double shift = obs.sigma2 + ridge_term(stats);
    for (int i = 0; i < rank; ++i)
        inv_gain(i) = 1.0 / (eig.eigenvalues()(n_fp - rank + i) + shift);

    std::vector<Eigen::MatrixXcd> filters;
    filters.reserve(stats.r_cross.size());
    for (const auto& cross : stats.r_cross) {
        const Eigen::MatrixXcd proj = cross * basis;  // n_f x rank
        filters.push_back(proj * inv_gain.asDiagonal() * basis.adjoint());
    }
    return interpolate_time(apply_filter(obs, filters), obs.pattern.symbol_positions,
                            obs.pattern.dims);
}

}  // namespace cebed::est
