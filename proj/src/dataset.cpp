// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/dataset.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace cebed::data {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::size_t grid_floats(const DatasetFamily& f) {
    return static_cast<std::size_t>(f.n_r) * f.dims.n_f * f.dims.n_s * 2;
}
std::size_t yp_floats(const DatasetFamily& f) {
    return static_cast<std::size_t>(f.n_r) * f.n_fp * f.n_sp * 2;
}
std::size_t xp_floats(const DatasetFamily& f) {
    return static_cast<std::size_t>(f.n_fp) * f.n_sp * 2;
}

void quantize(const ComplexGrid& g, float* out) {
    const auto& d = g.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        out[2 * i] = static_cast<float>(d[i].real());
        out[2 * i + 1] = static_cast<float>(d[i].imag());
    }
}

ComplexGrid widen(const float* in, GridDims dims, int antennas) {
    ComplexGrid g(dims, antennas);
    auto& d = g.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = cd{static_cast<double>(in[2 * i]), static_cast<double>(in[2 * i + 1])};
    return g;
}

}  // namespace

void DatasetFamily::validate() const {
    if (snr_domain.empty() || speed_domain.empty())
        throw std::invalid_argument("DatasetFamily: empty domain set");
    ScenarioSpec probe{profile, n_r, n_fp, n_sp, snr_domain.front(), speed_domain.front()};
    probe.validate();
    if (dims.n_f % n_fp != 0) throw std::invalid_argument("DatasetFamily: n_fp must divide n_f");
}

ComplexGrid Dataset::channel(int i) const {
    return widen(&h_true[static_cast<std::size_t>(i) * grid_floats(family)], family.dims,
                 family.n_r);
}

ComplexGrid Dataset::received_pilots(int i) const {
    return widen(&y_p[static_cast<std::size_t>(i) * yp_floats(family)],
                 GridDims{family.n_fp, family.n_sp}, family.n_r);
}

ComplexGrid Dataset::sent_pilots(int i) const {
    return widen(&x_p[static_cast<std::size_t>(i) * xp_floats(family)],
                 GridDims{family.n_fp, family.n_sp}, 1);
}

pilots::PilotPattern Dataset::pattern(int i) const {
    pilots::PilotPattern p = pilots::block_pattern(family.dims, family.n_fp, family.n_sp, 0);
    const ComplexGrid xp = sent_pilots(i);
    for (int pf = 0; pf < family.n_fp; ++pf)
        for (int ps = 0; ps < family.n_sp; ++ps)
            p.values[static_cast<std::size_t>(pf) * family.n_sp + ps] = xp.at(0, pf, ps);
    return p;
}

est::PilotObservation Dataset::observation(int i) const {
    return est::PilotObservation{received_pilots(i), sent_pilots(i), pattern(i),
                                 channel::noise_sigma2(snr_db[i]).sigma2};
}

bool Dataset::operator==(const Dataset& other) const {
    return family.profile == other.family.profile && family.n_r == other.family.n_r &&
           family.n_fp == other.family.n_fp && family.n_sp == other.family.n_sp &&
           family.snr_domain == other.family.snr_domain &&
           family.speed_domain == other.family.speed_domain && n_samples == other.n_samples &&
           master_seed == other.master_seed && h_true == other.h_true && y_p == other.y_p &&
           x_p == other.x_p && snr_db == other.snr_db && speed_mps == other.speed_mps &&
           sample_seeds == other.sample_seeds && has_split == other.has_split &&
           split.train == other.split.train && split.val == other.split.val &&
           split.test == other.split.test;
}

SampleView regenerate_sample(const DatasetFamily& family, double snr_db, double speed_mps,
                             std::uint64_t sample_seed) {
    const std::uint64_t channel_seed = derive_seed(sample_seed, "channel", 0);
    const std::uint64_t pilot_seed = derive_seed(sample_seed, "pilot", 0);
    const std::uint64_t noise_seed = derive_seed(sample_seed, "noise", 0);

    const ScenarioSpec scenario{family.profile, family.n_r, family.n_fp, family.n_sp, snr_db,
                                speed_mps};
    const channel::ChannelProfile prof = channel::profile_preset(family.profile);
    const channel::ChannelRealization h = channel::sample_channel(scenario, prof, channel_seed);
    const pilots::PilotPattern pat =
        pilots::block_pattern(family.dims, family.n_fp, family.n_sp, pilot_seed);

    // Received pilots computed directly on the pilot cells; data cells
    // are never stored, so the full-grid transmit is skipped.
    const ComplexGrid hp = pilots::extract(h.grid, pat);
    const double amp = std::sqrt(channel::noise_sigma2(snr_db).sigma2);
    Rng rng(noise_seed);
    ComplexGrid yp(GridDims{family.n_fp, family.n_sp}, family.n_r);
    ComplexGrid xp(GridDims{family.n_fp, family.n_sp}, 1);
    for (int pf = 0; pf < family.n_fp; ++pf)
        for (int ps = 0; ps < family.n_sp; ++ps) xp.at(0, pf, ps) = pat.value(pf, ps);
    for (int a = 0; a < family.n_r; ++a)
        for (int pf = 0; pf < family.n_fp; ++pf)
            for (int ps = 0; ps < family.n_sp; ++ps)
                yp.at(a, pf, ps) = hp.at(a, pf, ps) * xp.at(0, pf, ps) + amp * rng.cgaussian();

    return SampleView{h.grid, std::move(yp), std::move(xp), snr_db, speed_mps, sample_seed};
}

Dataset generate(const DatasetFamily& family, int n_samples, std::uint64_t master_seed, int jobs) {
    family.validate();
    if (n_samples < 1) throw std::invalid_argument("generate: n_samples must be >= 1");
    if (jobs < 1) jobs = 1;

    Dataset d;
    d.family = family;
    d.n_samples = n_samples;
    d.master_seed = master_seed;
    d.h_true.resize(static_cast<std::size_t>(n_samples) * grid_floats(family));
    d.y_p.resize(static_cast<std::size_t>(n_samples) * yp_floats(family));
    d.x_p.resize(static_cast<std::size_t>(n_samples) * xp_floats(family));
    d.snr_db.resize(n_samples);
    d.speed_mps.resize(n_samples);
    d.sample_seeds.resize(n_samples);

    // SNR-major domain enumeration; round-robin keeps pair counts within 1.
    const int pairs = family.domain_pairs();
    const int n_speed = static_cast<int>(family.speed_domain.size());

#pragma omp parallel for schedule(dynamic, 16) num_threads(jobs)
    for (int i = 0; i < n_samples; ++i) {
        const int pair = i % pairs;
        const double snr = family.snr_domain[pair / n_speed];
        const double speed = family.speed_domain[pair % n_speed];
        const std::uint64_t seed = derive_seed(master_seed, "sample", i);
        const SampleView s = regenerate_sample(family, snr, speed, seed);
        quantize(s.h_true, &d.h_true[static_cast<std::size_t>(i) * grid_floats(family)]);
        quantize(s.y_p, &d.y_p[static_cast<std::size_t>(i) * yp_floats(family)]);
        quantize(s.x_p, &d.x_p[static_cast<std::size_t>(i) * xp_floats(family)]);
        d.snr_db[i] = static_cast<float>(snr);
        d.speed_mps[i] = static_cast<float>(speed);
        d.sample_seeds[i] = seed;
    }
    return d;
}

Split split_dataset(Dataset& dataset, std::uint64_t master_seed) {
    const int n = dataset.n_samples;
    if (n < 10) throw std::invalid_argument("split: need at least 10 samples");
    const int n_val = static_cast<int>(std::lround(0.1 * n));
    const int n_test = static_cast<int>(std::lround(0.1 * n));
    const int n_train = n - n_val - n_test;

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Rng rng(derive_seed(master_seed, "split", 0));
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1))]);

    Split s;
    s.train.assign(perm.begin(), perm.begin() + n_train);
    s.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    s.test.assign(perm.begin() + n_train + n_val, perm.end());
    dataset.split = s;
    dataset.has_split = true;
    return s;
}

namespace {

void write_blob(const fs::path& file, const std::vector<float>& data, json& blob_meta,
                const std::string& name) {
    static_assert(std::endian::native == std::endian::little,
                  "blob writer assumes a little-endian host");
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("dataset save: cannot open " + file.string());
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!os) throw std::runtime_error("dataset save: write failed " + file.string());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64_bytes(data.data(), data.size() * sizeof(float))));
    blob_meta[name] = {{"file", name + ".bin"}, {"count", data.size()}, {"fnv1a64", hex}};
}

std::vector<float> read_blob(const fs::path& file, const json& meta) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("dataset load: cannot open " + file.string());
    std::vector<float> data(meta.at("count").get<std::size_t>());
    is.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!is || is.gcount() != static_cast<std::streamsize>(data.size() * sizeof(float)))
        throw std::runtime_error("dataset load: truncated blob " + file.string());
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64_bytes(data.data(), data.size() * sizeof(float))));
    if (meta.at("fnv1a64").get<std::string>() != hex)
        throw std::runtime_error("dataset load: checksum mismatch in " + file.string());
    return data;
}

}  // namespace

void save(const Dataset& d, const std::string& path) {
    fs::create_directories(path);
    json manifest;
    manifest["format_version"] = kFormatVersion;
    manifest["profile"] = profile_name(d.family.profile);
    manifest["n_r"] = d.family.n_r;
    manifest["n_fp"] = d.family.n_fp;
    manifest["n_sp"] = d.family.n_sp;
    manifest["n_f"] = d.family.dims.n_f;
    manifest["n_s"] = d.family.dims.n_s;
    manifest["snr_domain"] = d.family.snr_domain;
    manifest["speed_domain"] = d.family.speed_domain;
    manifest["n_samples"] = d.n_samples;
    manifest["master_seed"] = std::to_string(d.master_seed);
    std::vector<std::string> seeds;
    seeds.reserve(d.sample_seeds.size());
    for (auto s : d.sample_seeds) seeds.push_back(std::to_string(s));
    manifest["sample_seeds"] = seeds;
    if (d.has_split) {
        manifest["split"] = {{"train", d.split.train}, {"val", d.split.val}, {"test", d.split.test}};
    }

    json blobs;
    write_blob(fs::path(path) / "h_true.bin", d.h_true, blobs, "h_true");
    write_blob(fs::path(path) / "y_p.bin", d.y_p, blobs, "y_p");
    write_blob(fs::path(path) / "x_p.bin", d.x_p, blobs, "x_p");
    write_blob(fs::path(path) / "snr_db.bin", d.snr_db, blobs, "snr_db");
    write_blob(fs::path(path) / "speed_mps.bin", d.speed_mps, blobs, "speed_mps");
    manifest["blobs"] = blobs;

    std::ofstream os(fs::path(path) / "manifest.json");
    if (!os) throw std::runtime_error("dataset save: cannot write manifest");
    os << manifest.dump(2) << "\n";
}

Dataset load(const std::string& path) {
    std::ifstream is(fs::path(path) / "manifest.json");
    if (!is) throw std::runtime_error("dataset load: missing manifest in " + path);
    json manifest = json::parse(is);

    if (manifest.at("format_version").get<int>() != kFormatVersion)
        throw std::runtime_error("dataset load: format version mismatch");

    Dataset d;
    d.family.profile = profile_from_name(manifest.at("profile").get<std::string>());
    d.family.n_r = manifest.at("n_r").get<int>();
    d.family.n_fp = manifest.at("n_fp").get<int>();
    d.family.n_sp = manifest.at("n_sp").get<int>();
    d.family.dims.n_f = manifest.at("n_f").get<int>();
    d.family.dims.n_s = manifest.at("n_s").get<int>();
    d.family.snr_domain = manifest.at("snr_domain").get<std::vector<double>>();
    d.family.speed_domain = manifest.at("speed_domain").get<std::vector<double>>();
    d.n_samples = manifest.at("n_samples").get<int>();
    d.master_seed = std::stoull(manifest.at("master_seed").get<std::string>());
    for (const auto& s : manifest.at("sample_seeds"))
        d.sample_seeds.push_back(std::stoull(s.get<std::string>()));
    if (static_cast<int>(d.sample_seeds.size()) != d.n_samples)
        throw std::runtime_error("dataset load: seed count mismatch");
    if (manifest.contains("split")) {
        d.split.train = manifest["split"].at("train").get<std::vector<int>>();
        d.split.val = manifest["split"].at("val").get<std::vector<int>>();
        d.split.test = manifest["split"].at("test").get<std::vector<int>>();
        d.has_split = true;
    }

    const json& blobs = manifest.at("blobs");
    d.h_true = read_blob(fs::path(path) / "h_true.bin", blobs.at("h_true"));
    d.y_p = read_blob(fs::path(path) / "y_p.bin", blobs.at("y_p"));
    d.x_p = read_blob(fs::path(path) / "x_p.bin", blobs.at("x_p"));
    d.snr_db = read_blob(fs::path(path) / "snr_db.bin", blobs.at("snr_db"));
    d.speed_mps = read_blob(fs::path(path) / "speed_mps.bin", blobs.at("speed_mps"));

    if (d.h_true.size() != static_cast<std::size_t>(d.n_samples) * grid_floats(d.family) ||
        d.y_p.size() != static_cast<std::size_t>(d.n_samples) * yp_floats(d.family) ||
        d.x_p.size() != static_cast<std::size_t>(d.n_samples) * xp_floats(d.family))
        throw std::runtime_error("dataset load: payload size mismatch");
    return d;
}

}  // namespace cebed::data
