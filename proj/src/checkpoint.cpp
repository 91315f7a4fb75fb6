// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cebed::nn {

namespace {

constexpr char kMagic[8] = {'C', 'E', 'B', 'E', 'D', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(os, bits);
}

float get_f32(std::istream& is) {
    const std::uint32_t bits = get_u32(is);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<ParamEntry>& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    os.write(kMagic, 8);
    put_u32(os, kVersion);
    put_u32(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& p : params) {
        put_u32(os, static_cast<std::uint32_t>(p.name.size()));
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        put_u32(os, static_cast<std::uint32_t>(p.shape.size()));
        std::size_t numel = 1;
        for (int d : p.shape) {
            put_u32(os, static_cast<std::uint32_t>(d));
            numel *= static_cast<std::size_t>(d);
        }
        if (numel != p.values.size())
            throw std::invalid_argument("checkpoint: shape/value mismatch for " + p.name);
    }
    for (const auto& p : params)
        for (float v : p.values) put_f32(os, v);
    if (!os) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<ParamEntry> load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (get_u32(is) != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    const std::uint32_t count = get_u32(is);
    std::vector<ParamEntry> params(count);
    for (auto& p : params) {
        const std::uint32_t name_len = get_u32(is);
        p.name.resize(name_len);
        is.read(p.name.data(), name_len);
        const std::uint32_t ndim = get_u32(is);
        p.shape.resize(ndim);
        std::size_t numel = 1;
        for (auto& d : p.shape) {
            d = static_cast<int>(get_u32(is));
            numel *= static_cast<std::size_t>(d);
        }
        p.values.resize(numel);
    }
    for (auto& p : params)
        for (float& v : p.values) v = get_f32(is);
    if (!is) throw std::runtime_error("checkpoint: truncated file " + path);
    return params;
}

}  // namespace cebed::nn
