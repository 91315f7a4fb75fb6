// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cebed/checkpoint.hpp"
#include "cebed/classical.hpp"
#include "cebed/grid.hpp"
#include "cebed/tensor.hpp"
#include "cebed/train.hpp"

namespace cebed::zoo {

enum class ModelName { ChannelNet, ReEsNet, InReEsNet, MReEsNet, DDAE, MTRE, HA02 };
enum class InputKind { LowRes, Masked };

const char* model_name_str(ModelName m);
ModelName model_name_from(std::string_view s);
InputKind input_kind_of(ModelName m);

// Architecture hyperparameters. Dims derive from the scenario; the width
// and depth knobs carry the fixed defaults and stay config-overridable.
struct ModelSpec {
    ModelName name = ModelName::ReEsNet;
    int n_f = 72, n_s = 14, n_fp = 72, n_sp = 2, n_r = 1;

    int srcnn_c1 = 64, srcnn_c2 = 32;  // ChannelNet SRCNN widths (9-5-5 kernels)
    int denoise_channels = 64;         // ChannelNet 5-layer denoiser width
    int res_blocks = 4, res_channels = 16;          // ReEsNet trunk
    int dense_hidden1 = 1024, dense_hidden2 = 512;  // DDAE bottleneck
    int embed_dim = 128, heads = 4, ffn_dim = 256;  // transformer blocks
    int encoder_blocks = 2;                         // MTRE depth (HA02 uses 1)
    int decoder_blocks = 2;                         // HA02 residual decoder depth

    InputKind input_kind() const { return input_kind_of(name); }
    int planes() const { return 2 * n_r; }

    static ModelSpec defaults(ModelName name, const ScenarioSpec& sc);
    void validate() const;
};

// A baseline estimator: an ordered parameter list plus a forward-graph
// builder. Parameters are registered on the tape in list order, so tape
// parameter ids align with params() by index.
class Model : public train::TrainableModel {
  public:
    Model(ModelSpec spec, std::uint64_t seed);

    const ModelSpec& spec() const { return spec_; }
    std::vector<std::pair<std::string, nn::Tensor>>& params() { return params_; }
    const std::vector<std::pair<std::string, nn::Tensor>>& params() const { return params_; }
    std::size_t param_count() const;

    // Builds the forward graph; input is a tape node holding
    // [B, n_fp, n_sp, 2 n_r] (LowRes) or [B, n_f, n_s, 2 n_r] (Masked).
    // With trainable=false parameters enter the tape as constants.
    int forward(nn::Tape& tape, int input, bool trainable = true) const;

    std::vector<std::pair<std::string, nn::Tensor>>& trainable_params() override {
        return params_;
    }
    int build_forward(nn::Tape& tape, int input, bool trainable) const override {
        return forward(tape, input, trainable);
    }

    std::vector<nn::ParamEntry> to_entries() const;
    void from_entries(const std::vector<nn::ParamEntry>& entries);

  private:
    ModelSpec spec_;
    std::vector<std::pair<std::string, nn::Tensor>> params_;
};

// Pilot observation -> network input tensor (no batch axis). LowRes is
// the LS pilot estimate as an n_fp x n_sp image; Masked embeds the same
// values into an otherwise-zero full grid. Feature planes are
// (re, im) per antenna, antenna-major.
nn::Tensor input_adapter(const est::PilotObservation& obs, InputKind kind);

// Complex grid <-> stacked real planes [n_f, n_s, 2 n_r].
nn::Tensor grid_to_planes(const ComplexGrid& g);
ComplexGrid planes_to_grid(const nn::Tensor& t);

// Stacks per-sample tensors into one batch tensor.
nn::Tensor stack(const std::vector<nn::Tensor>& items);

// Single-observation estimate through the model.
ComplexGrid estimate(const Model& model, const est::PilotObservation& obs);

// Batched forward for evaluation; returns per-sample output tensors.
std::vector<nn::Tensor> estimate_batch(const Model& model, const std::vector<nn::Tensor>& inputs,
                                       int batch_size);

}  // namespace cebed::zoo
