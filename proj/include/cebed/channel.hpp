// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cebed/grid.hpp"

namespace cebed::channel {

// Tapped-delay-line surrogate profile. Frequency selectivity comes from
// the power-delay profile, time selectivity from the Doppler process.
struct ChannelProfile {
    Profile name = Profile::UmiLike;
    std::vector<double> tap_delays;  // seconds, strictly increasing, first >= 0
    std::vector<double> tap_powers;  // linear, positive, sum to 1
    double carrier_hz = 2.1e9;
    double scs_hz = 30e3;
    // Exponential antenna-correlation coefficient used when n_r > 1.
    double spatial_corr = 0.9;

    void validate() const;
};

// Presets addressable by name ("umi-like", "uma-like"): 8-tap exponential
// power-delay profiles with RMS delay spreads of 100 ns and 300 ns.
ChannelProfile profile_preset(Profile p);
ChannelProfile profile_preset(std::string_view name);

struct ChannelRealization {
    ComplexGrid grid;  // n_r x n_f x n_s, unit average energy
};

struct NoiseSpec {
    double sigma2 = 0.0;
};

// SNR in dB relative to unit-energy resource elements.
NoiseSpec noise_sigma2(double snr_db);

// Exponential spatial covariance R[i,j] = coeff^|i-j|; coeff in [0,1).
Eigen::MatrixXd spatial_covariance(int n_r, double coeff);

// Scales the grid so the mean of |h|^2 over all entries is exactly 1.
// Invariant under any positive pre-scaling of the raw gains.
void normalize_unit_energy(ComplexGrid& grid);

// Draws one time-variant, frequency-selective, spatially correlated
// channel realization. Per-tap complex gains follow a Jakes-type
// sum-of-sinusoids with maximum Doppler speed*carrier/c; the grid is
// normalized to unit average energy.
ChannelRealization sample_channel(const ScenarioSpec& scenario, const ChannelProfile& profile,
                                  std::uint64_t seed);

// Y_r = H_r elementwise* X + W_r with W_r circularly symmetric complex
// Gaussian of variance sigma2 per entry. X must have a single antenna.
ComplexGrid transmit(const ChannelRealization& h, const ComplexGrid& x, NoiseSpec noise,
                     std::uint64_t seed);

}  // namespace cebed::channel
