// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <string>
#include <vector>

namespace cebed::nn {

struct ParamEntry {
    std::string name;
    std::vector<int> shape;
    std::vector<float> values;
};

// Flat binary checkpoint: magic "CEBEDCKP", u32 version, u32 parameter
// count, per-parameter (u32 name length, name bytes, u32 ndim, u32 dims),
// then all values as little-endian 32-bit floats in manifest order.
void save_checkpoint(const std::string& path, const std::vector<ParamEntry>& params);
std::vector<ParamEntry> load_checkpoint(const std::string& path);

}  // namespace cebed::nn
