// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cebed/rng.hpp"

namespace cebed {

using cd = std::complex<double>;

// Resource-grid dimensions: n_f subcarriers by n_s OFDM symbols.
struct GridDims {
    int n_f = 72;
    int n_s = 14;

    bool operator==(const GridDims&) const = default;
    int cells() const { return n_f * n_s; }
};

// Dense complex grid over (antenna, subcarrier, symbol), antenna-major,
// then subcarrier, then symbol. One instance represents whichever role
// the caller gives it: transmitted symbols, channel coefficients,
// received symbols or noise.
class ComplexGrid {
  public:
    ComplexGrid() = default;
    ComplexGrid(GridDims dims, int antennas);
    ComplexGrid(GridDims dims, int antennas, std::vector<cd> data);

    const GridDims& dims() const { return dims_; }
    int antennas() const { return antennas_; }
    std::size_t size() const { return data_.size(); }

    cd& at(int antenna, int f, int s) { return data_[index(antenna, f, s)]; }
    const cd& at(int antenna, int f, int s) const { return data_[index(antenna, f, s)]; }

    std::vector<cd>& data() { return data_; }
    const std::vector<cd>& data() const { return data_; }

    std::size_t index(int antenna, int f, int s) const {
        return (static_cast<std::size_t>(antenna) * dims_.n_f + f) * dims_.n_s + s;
    }

    // Throws if any entry is non-finite.
    void check_finite() const;

    // Mean of |v|^2 over all entries.
    double mean_energy() const;

  private:
    GridDims dims_{};
    int antennas_ = 0;
    std::vector<cd> data_;
};

enum class Profile { UmiLike, UmaLike };

const char* profile_name(Profile p);
Profile profile_from_name(std::string_view name);

// One wireless environment: channel profile, receive antennas, pilot
// counts, SNR and transmitter speed.
struct ScenarioSpec {
    Profile profile = Profile::UmiLike;
    int n_r = 1;
    int n_fp = 72;
    int n_sp = 2;
    double snr_db = 10.0;
    double speed_mps = 0.0;

    // Throws std::invalid_argument naming the first out-of-range field.
    void validate() const;
};

// Grid of random Gray-labelled QPSK symbols, one antenna, deterministic
// in the seed. Every entry has unit modulus.
ComplexGrid qpsk_grid(std::uint64_t seed, GridDims dims);

}  // namespace cebed
