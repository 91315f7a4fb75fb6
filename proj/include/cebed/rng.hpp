// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string_view>

namespace cebed {

// 64-bit finalizer used for seed mixing. Bijective, so distinct inputs
// never collapse before the final xor-shift cascade.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t fnv1a64_bytes(const void* data, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct SeedSpec {
    std::uint64_t master = 0;
    std::string_view stream_label;
    std::uint64_t index = 0;
};

// Pure mixing of (master, label, index) into one 64-bit stream seed.
// Distinct (label, index) pairs map to distinct seeds with overwhelming
// probability; identical inputs always reproduce the same seed.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_label,
                                    std::uint64_t index) {
    std::uint64_t h = splitmix64(master ^ fnv1a64(stream_label));
    h = splitmix64(h ^ index);
    return splitmix64(h);
}

constexpr std::uint64_t derive_seed(const SeedSpec& s) {
    return derive_seed(s.master, s.stream_label, s.index);
}

// xoshiro256++ with a splitmix64-expanded state. Self-contained so that
// streams are bit-identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) {
            x = splitmix64(x);
            w = x;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1) with 53 significant bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; one pair per two calls.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Circularly symmetric complex normal with unit total variance.
    std::complex<double> cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re * 0.70710678118654752440, im * 0.70710678118654752440};
    }

    // Gray-labelled QPSK point from two uniform bits: (+-1 +-1j)/sqrt(2).
    std::complex<double> qpsk() {
        const std::uint64_t bits = next_u64();
        const double re = (bits & 1) ? -0.70710678118654752440 : 0.70710678118654752440;
        const double im = (bits & 2) ? -0.70710678118654752440 : 0.70710678118654752440;
        return {re, im};
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free Lemire reduction; bias < 2^-64, irrelevant here.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace cebed
