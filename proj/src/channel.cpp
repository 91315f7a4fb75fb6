// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace cebed::channel {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;
constexpr int kSinusoidsPerTap = 32;
}  // namespace

void ChannelProfile::validate() const {
    if (tap_delays.empty()) throw std::invalid_argument("ChannelProfile: empty tap list");
    if (tap_delays.size() != tap_powers.size())
        throw std::invalid_argument("ChannelProfile: delays/powers length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < tap_delays.size(); ++i) {
        if (tap_delays[i] < 0.0) throw std::invalid_argument("ChannelProfile: negative tap delay");
        if (i > 0 && tap_delays[i] <= tap_delays[i - 1])
            throw std::invalid_argument("ChannelProfile: tap delays must be strictly increasing");
        if (tap_powers[i] <= 0.0) throw std::invalid_argument("ChannelProfile: non-positive tap power");
        sum += tap_powers[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ChannelProfile: tap powers must sum to 1");
}

ChannelProfile profile_preset(Profile p) {
    const int n_taps = 8;
    const double rms_target = (p == Profile::UmiLike) ? 100e-9 : 300e-9;

    // Exponential profile on a uniform raw grid, then the delay axis is
    // scaled so the discrete RMS delay spread hits the target exactly.
    std::vector<double> delays(n_taps), powers(n_taps);
    double psum = 0.0;
    for (int l = 0; l < n_taps; ++l) {
        delays[l] = 0.5 * l;
        powers[l] = std::exp(-0.5 * l);
        psum += powers[l];
    }
    for (double& w : powers) w /= psum;
    double mean = 0.0, second = 0.0;
    for (int l = 0; l < n_taps; ++l) {
        mean += powers[l] * delays[l];
        second += powers[l] * delays[l] * delays[l];
    }
    const double rms_raw = std::sqrt(second - mean * mean);
    for (double& d : delays) d *= rms_target / rms_raw;

    ChannelProfile prof;
    prof.name = p;
    prof.tap_delays = std::move(delays);
    prof.tap_powers = std::move(powers);
    prof.validate();
    return prof;
}

ChannelProfile profile_preset(std::string_view name) {
    return profile_preset(profile_from_name(name));
}

NoiseSpec noise_sigma2(double snr_db) {
    return NoiseSpec{std::pow(10.0, -snr_db / 10.0)};
}

void normalize_unit_energy(ComplexGrid& grid) {
    const double energy = grid.mean_energy();
    if (!(energy > 0.0)) throw std::runtime_error("normalize_unit_energy: zero-energy grid");
    const double scale = 1.0 / std::sqrt(energy);
    for (cd& v : grid.data()) v *= scale;
}

Eigen::MatrixXd spatial_covariance(int n_r, double coeff) {
    if (n_r < 1) throw std::invalid_argument("spatial_covariance: n_r must be >= 1");
    if (!(coeff >= 0.0 && coeff < 1.0))
        throw std::invalid_argument("spatial_covariance: coeff must be in [0,1)");
    Eigen::MatrixXd r(n_r, n_r);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_r; ++j) r(i, j) = std::pow(coeff, std::abs(i - j));
    return r;
}

ChannelRealization sample_channel(const ScenarioSpec& scenario, const ChannelProfile& profile,
                                  std::uint64_t seed) {
    scenario.validate();
    profile.validate();
    if (profile.name != scenario.profile)
        throw std::invalid_argument("sample_channel: profile does not match scenario.profile");

    const int n_r = scenario.n_r;
    const GridDims dims{};  // 72 x 14 default grid
    const int n_taps = static_cast<int>(profile.tap_delays.size());
    const double f_d = scenario.speed_mps * profile.carrier_hz / kSpeedOfLight;
    const double t_symbol = 1.0 / profile.scs_hz;

    Rng rng(seed);

    // Per-antenna, per-tap Jakes sum-of-sinusoids gains across symbols.
    // g[(a*n_taps + l)*n_s + s]
    std::vector<cd> gains(static_cast<std::size_t>(n_r) * n_taps * dims.n_s);
    for (int a = 0; a < n_r; ++a) {
        for (int l = 0; l < n_taps; ++l) {
            const double amp = std::sqrt(profile.tap_powers[l] / kSinusoidsPerTap);
            double omega[kSinusoidsPerTap], phase[kSinusoidsPerTap];
            for (int n = 0; n < kSinusoidsPerTap; ++n) {
                const double alpha = 2.0 * kPi * rng.uniform();
                omega[n] = 2.0 * kPi * f_d * std::cos(alpha);
                phase[n] = 2.0 * kPi * rng.uniform();
            }
            for (int s = 0; s < dims.n_s; ++s) {
                const double t = s * t_symbol;
                double re = 0.0, im = 0.0;
                for (int n = 0; n < kSinusoidsPerTap; ++n) {
                    const double arg = omega[n] * t + phase[n];
                    re += std::cos(arg);
                    im += std::sin(arg);
                }
                gains[(static_cast<std::size_t>(a) * n_taps + l) * dims.n_s + s] =
                    cd{amp * re, amp * im};
            }
        }
    }

    // Mix antennas through the Cholesky factor of the spatial covariance.
    if (n_r > 1) {
        const Eigen::MatrixXd cov = spatial_covariance(n_r, profile.spatial_corr);
        const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
        std::vector<cd> mixed(gains.size());
        for (int a = 0; a < n_r; ++a)
            for (int l = 0; l < n_taps; ++l)
                for (int s = 0; s < dims.n_s; ++s) {
                    cd acc{0.0, 0.0};
                    for (int b = 0; b <= a; ++b)
                        acc += chol(a, b) *
                               gains[(static_cast<std::size_t>(b) * n_taps + l) * dims.n_s + s];
                    mixed[(static_cast<std::size_t>(a) * n_taps + l) * dims.n_s + s] = acc;
                }
        gains.swap(mixed);
    }

    // Delay-domain transform per subcarrier: sum_l g_l(t) exp(-j 2 pi f_k tau_l).
    std::vector<cd> steer(static_cast<std::size_t>(dims.n_f) * n_taps);
    for (int k = 0; k < dims.n_f; ++k)
        for (int l = 0; l < n_taps; ++l) {
            const double arg = -2.0 * kPi * k * profile.scs_hz * profile.tap_delays[l];
            steer[static_cast<std::size_t>(k) * n_taps + l] = cd{std::cos(arg), std::sin(arg)};
        }

    ComplexGrid grid(dims, n_r);
    for (int a = 0; a < n_r; ++a)
        for (int k = 0; k < dims.n_f; ++k)
            for (int s = 0; s < dims.n_s; ++s) {
                cd acc{0.0, 0.0};
                for (int l = 0; l < n_taps; ++l)
                    acc += gains[(static_cast<std::size_t>(a) * n_taps + l) * dims.n_s + s] *
                           steer[static_cast<std::size_t>(k) * n_taps + l];
                grid.at(a, k, s) = acc;
            }

    normalize_unit_energy(grid);
    grid.check_finite();
    return ChannelRealization{std::move(grid)};
}

ComplexGrid transmit(const ChannelRealization& h, const ComplexGrid& x, NoiseSpec noise,
                     std::uint64_t seed) {
    if (x.antennas() != 1) throw std::invalid_argument("transmit: X must have one antenna");
    if (!(x.dims() == h.grid.dims()))
        throw std::invalid_argument("transmit: X dims do not match channel dims");
    if (noise.sigma2 < 0.0) throw std::invalid_argument("transmit: sigma2 must be >= 0");

    const double amp = std::sqrt(noise.sigma2);
    Rng rng(seed);
    ComplexGrid y(h.grid.dims(), h.grid.antennas());
    for (int a = 0; a < h.grid.antennas(); ++a)
        for (int f = 0; f < h.grid.dims().n_f; ++f)
            for (int s = 0; s < h.grid.dims().n_s; ++s)
                y.at(a, f, s) = h.grid.at(a, f, s) * x.at(0, f, s) + amp * rng.cgaussian();
    return y;
}

}  // namespace cebed::channel
