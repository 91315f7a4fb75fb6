// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cebed/channel.hpp"
#include "cebed/classical.hpp"
#include "cebed/grid.hpp"
#include "cebed/pilots.hpp"

namespace cebed::data {

// A scenario family: fixed profile, antenna and pilot configuration,
// with SNR and speed domain sets mixed into one dataset.
struct DatasetFamily {
    Profile profile = Profile::UmiLike;
    int n_r = 1;
    int n_fp = 72;
    int n_sp = 2;
    std::vector<double> snr_domain{0, 5, 10, 15, 20};
    std::vector<double> speed_domain{0, 5, 10, 15};
    GridDims dims{};

    void validate() const;
    int domain_pairs() const {
        return static_cast<int>(snr_domain.size() * speed_domain.size());
    }
};

// One generated sample, stored exactly as the on-disk 32-bit layout.
struct SampleView {
    ComplexGrid h_true;  // n_r x n_f x n_s
    ComplexGrid y_p;     // n_r x n_fp x n_sp
    ComplexGrid x_p;     // 1 x n_fp x n_sp
    double snr_db = 0;
    double speed_mps = 0;
    std::uint64_t sample_seed = 0;
};

struct Split {
    std::vector<int> train, val, test;
};

class Dataset {
  public:
    DatasetFamily family;
    int n_samples = 0;
    std::uint64_t master_seed = 0;

    // Interleaved (re, im) float payloads, one blob per field.
    std::vector<float> h_true, y_p, x_p;
    std::vector<float> snr_db, speed_mps;
    std::vector<std::uint64_t> sample_seeds;
    Split split;
    bool has_split = false;

    ComplexGrid channel(int i) const;
    ComplexGrid received_pilots(int i) const;
    ComplexGrid sent_pilots(int i) const;
    pilots::PilotPattern pattern(int i) const;
    est::PilotObservation observation(int i) const;

    bool operator==(const Dataset& other) const;
};

// Balanced multi-domain generation: sample i draws domain pair i mod P
// (SNR-major enumeration), then channel, pilots and noise from seeds
// derived off (master_seed, "sample", i). `jobs` bounds the OpenMP team;
// results are bit-identical for any job count.
Dataset generate(const DatasetFamily& family, int n_samples, std::uint64_t master_seed,
                 int jobs = 1);

// Regenerates sample i of a family from its recorded seed alone.
SampleView regenerate_sample(const DatasetFamily& family, double snr_db, double speed_mps,
                             std::uint64_t sample_seed);

// Random 80/10/10 split (rounded to nearest, train takes the remainder).
Split split_dataset(Dataset& dataset, std::uint64_t master_seed);

// Directory format: manifest.json plus one little-endian float32 blob
// per field, each checksummed. Round-trips bit-exactly.
void save(const Dataset& dataset, const std::string& path);
Dataset load(const std::string& path);

}  // namespace cebed::data
