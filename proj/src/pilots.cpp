// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/pilots.hpp"

#include <stdexcept>

namespace cebed::pilots {

int PilotPattern::mask_count() const {
    int n = 0;
    for (auto m : mask) n += (m != 0);
    return n;
}

PilotPattern block_pattern(GridDims dims, int n_fp, int n_sp, std::uint64_t seed) {
    if (n_sp != 1 && n_sp != 2) throw std::invalid_argument("block_pattern: n_sp must be 1 or 2");
    if (n_fp < 1 || dims.n_f % n_fp != 0)
        throw std::invalid_argument("block_pattern: n_fp must divide n_f");

    PilotPattern p;
    p.dims = dims;
    p.n_fp = n_fp;
    p.n_sp = n_sp;
    p.symbol_positions = (n_sp == 2) ? std::vector<int>{3, 10} : std::vector<int>{3};
    for (int s : p.symbol_positions)
        if (s >= dims.n_s) throw std::invalid_argument("block_pattern: grid too short in time");

    const int stride = dims.n_f / n_fp;
    p.subcarrier_positions.reserve(n_fp);
    for (int i = 0; i < n_fp; ++i) p.subcarrier_positions.push_back(i * stride);

    p.mask.assign(static_cast<std::size_t>(dims.n_f) * dims.n_s, 0);
    for (int f : p.subcarrier_positions)
        for (int s : p.symbol_positions) p.mask[static_cast<std::size_t>(f) * dims.n_s + s] = 1;

    Rng rng(seed);
    p.values.resize(static_cast<std::size_t>(n_fp) * n_sp);
    for (cd& v : p.values) v = rng.qpsk();
    return p;
}

ComplexGrid extract(const ComplexGrid& grid, const PilotPattern& pattern) {
    if (!(grid.dims() == pattern.dims))
        throw std::invalid_argument("extract: grid dims do not match pattern dims");
    ComplexGrid out(GridDims{pattern.n_fp, pattern.n_sp}, grid.antennas());
    for (int a = 0; a < grid.antennas(); ++a)
        for (int pf = 0; pf < pattern.n_fp; ++pf)
            for (int ps = 0; ps < pattern.n_sp; ++ps)
                out.at(a, pf, ps) =
                    grid.at(a, pattern.subcarrier_positions[pf], pattern.symbol_positions[ps]);
    return out;
}

ComplexGrid embed_masked(const ComplexGrid& values, const PilotPattern& pattern) {
    if (values.dims().n_f != pattern.n_fp || values.dims().n_s != pattern.n_sp)
        throw std::invalid_argument("embed_masked: value shape does not match pattern counts");
    ComplexGrid out(pattern.dims, values.antennas());
    for (int a = 0; a < values.antennas(); ++a)
        for (int pf = 0; pf < pattern.n_fp; ++pf)
            for (int ps = 0; ps < pattern.n_sp; ++ps)
                out.at(a, pattern.subcarrier_positions[pf], pattern.symbol_positions[ps]) =
                    values.at(a, pf, ps);
    return out;
}

}  // namespace cebed::pilots
