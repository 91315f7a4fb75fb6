// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cebed {

static void check_dims(GridDims dims, int antennas) {
    if (dims.n_f < 1 || dims.n_s < 1)
        throw std::invalid_argument("GridDims: n_f and n_s must be >= 1");
    if (antennas < 1) throw std::invalid_argument("ComplexGrid: antennas must be >= 1");
}

ComplexGrid::ComplexGrid(GridDims dims, int antennas) : dims_(dims), antennas_(antennas) {
    check_dims(dims, antennas);
    data_.assign(static_cast<std::size_t>(antennas) * dims.cells(), cd{0.0, 0.0});
}

ComplexGrid::ComplexGrid(GridDims dims, int antennas, std::vector<cd> data)
    : dims_(dims), antennas_(antennas), data_(std::move(data)) {
    check_dims(dims, antennas);
    const std::size_t expect = static_cast<std::size_t>(antennas) * dims.cells();
    if (data_.size() != expect)
        throw std::invalid_argument("ComplexGrid: data length " + std::to_string(data_.size()) +
                                    " does not match antennas*n_f*n_s = " + std::to_string(expect));
}

void ComplexGrid::check_finite() const {
    for (const cd& v : data_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::runtime_error("ComplexGrid: non-finite entry");
}

double ComplexGrid::mean_energy() const {
    double acc = 0.0;
    for (const cd& v : data_) acc += std::norm(v);
    return acc / static_cast<double>(data_.size());
}

const char* profile_name(Profile p) {
    return p == Profile::UmiLike ? "umi-like" : "uma-like";
}

Profile profile_from_name(std::string_view name) {
    if (name == "umi-like") return Profile::UmiLike;
    if (name == "uma-like") return Profile::UmaLike;
    throw std::invalid_argument("unknown channel profile: " + std::string(name));
}

void ScenarioSpec::validate() const {
    if (n_r != 1 && n_r != 4 && n_r != 8 && n_r != 16)
        throw std::invalid_argument("ScenarioSpec: n_r must be one of {1,4,8,16}");
    if (n_fp != 36 && n_fp != 72)
        throw std::invalid_argument("ScenarioSpec: n_fp must be one of {36,72}");
    if (n_sp != 1 && n_sp != 2)
        throw std::invalid_argument("ScenarioSpec: n_sp must be one of {1,2}");
    if (!(speed_mps >= 0.0))
        throw std::invalid_argument("ScenarioSpec: speed_mps must be >= 0");
    if (!std::isfinite(snr_db)) throw std::invalid_argument("ScenarioSpec: snr_db must be finite");
}

ComplexGrid qpsk_grid(std::uint64_t seed, GridDims dims) {
    ComplexGrid g(dims, 1);
    Rng rng(seed);
    for (cd& v : g.data()) v = rng.qpsk();
    return g;
}

}  // namespace cebed
