// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cebed/grid.hpp"
#include "cebed/pilots.hpp"

namespace cebed::est {

// Everything an estimator may use: received pilots, known transmitted
// pilots, the pattern they live on and the noise variance.
struct PilotObservation {
    ComplexGrid y_p;               // n_r x n_fp x n_sp
    ComplexGrid x_p;               // 1 x n_fp x n_sp
    pilots::PilotPattern pattern;
    double sigma2 = 0.0;

    void validate() const;
};

// Second-order channel statistics at the pilot geometry. r_cross[i] maps
// pilot subcarriers to all subcarriers for pilot symbol i; r_auto is the
// pilot auto-correlation pooled over pilot symbols.
struct ChannelStats {
    std::vector<Eigen::MatrixXcd> r_cross;  // n_sp matrices, n_f x n_fp
    Eigen::MatrixXcd r_auto;                // n_fp x n_fp, Hermitian
    long sample_count = 0;
};

struct LmmseFilter {
    std::vector<Eigen::MatrixXcd> f;  // per pilot symbol, n_f x n_fp
};

// Streaming builder for ChannelStats; antennas pool as extra samples.
class StatsAccumulator {
  public:
    StatsAccumulator(const pilots::PilotPattern& pattern);
    void add(const ComplexGrid& channel);
    ChannelStats finalize() const;  // throws if fewer than n_fp samples

  private:
    pilots::PilotPattern pattern_;
    std::vector<Eigen::MatrixXcd> cross_;
    Eigen::MatrixXcd auto_;
    long count_ = 0;
};

// Elementwise LS estimate at pilot cells: H_p = y_p / x_p per antenna.
ComplexGrid ls_pilot(const PilotObservation& obs);

// Linear interpolation of pilot-cell estimates to the full grid:
// frequency first (nearest extrapolation at band edges), then time
// (replication when a single pilot symbol is present).
ComplexGrid interpolate_linear(const ComplexGrid& h_p, const pilots::PilotPattern& pattern,
                               GridDims dims);

// Sample second-order statistics from true channel realizations.
ChannelStats estimate_stats(const std::vector<ComplexGrid>& channels,
                            const pilots::PilotPattern& pattern);

// F_i = R_cross_i (R_auto + sigma2 I)^-1 via Hermitian factorization.
LmmseFilter build_lmmse_filter(const ChannelStats& stats, double sigma2);

// Frequency-domain LMMSE at pilot symbols only: n_r x n_f x n_sp.
ComplexGrid lmmse_fd(const PilotObservation& obs, const ChannelStats& stats);

// lmmse_fd followed by linear time interpolation to the full grid.
ComplexGrid lmmse_2d(const PilotObservation& obs, const ChannelStats& stats);

// Low-rank LMMSE: keep the top `rank` eigenpairs of r_auto and filter in
// that subspace; rank = n_fp reproduces lmmse_2d.
ComplexGrid almmse(const PilotObservation& obs, const ChannelStats& stats, int rank);

// Shared time-interpolation step from per-pilot-symbol estimates
// (n_r x n_f x n_sp) to the full grid.
ComplexGrid interpolate_time(const ComplexGrid& per_symbol, const std::vector<int>& symbol_positions,
                             GridDims dims);

}  // namespace cebed::est
