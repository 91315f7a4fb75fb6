// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cstdint>
#include <vector>

#include "cebed/grid.hpp"

namespace cebed::pilots {

// Block pilot pattern: whole OFDM symbols carry pilots on a uniform
// subcarrier comb. `values` holds the known transmitted pilots X_p in
// subcarrier-major, then symbol order.
struct PilotPattern {
    GridDims dims;
    std::vector<std::uint8_t> mask;  // n_f * n_s, subcarrier-major
    std::vector<cd> values;          // n_fp * n_sp
    int n_fp = 0;
    int n_sp = 0;
    std::vector<int> subcarrier_positions;
    std::vector<int> symbol_positions;

    bool masked(int f, int s) const {
        return mask[static_cast<std::size_t>(f) * dims.n_s + s] != 0;
    }
    const cd& value(int pf, int ps) const { return values[static_cast<std::size_t>(pf) * n_sp + ps]; }
    int mask_count() const;
};

// Pilot symbols sit at OFDM symbols {3,10} (or {3} for single-symbol
// patterns); pilot subcarriers are evenly spaced with stride n_f/n_fp
// starting at 0. Values are random QPSK drawn from the seed.
PilotPattern block_pattern(GridDims dims, int n_fp, int n_sp, std::uint64_t seed);

// Copies grid values at masked cells into an n_r x n_fp x n_sp grid,
// subcarrier-major then symbol.
ComplexGrid extract(const ComplexGrid& grid, const PilotPattern& pattern);

// Places the given pilot-shaped values at masked cells of an otherwise
// all-zero full grid.
ComplexGrid embed_masked(const ComplexGrid& values, const PilotPattern& pattern);

}  // namespace cebed::pilots
