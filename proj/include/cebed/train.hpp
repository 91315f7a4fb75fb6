// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cebed/optim.hpp"
#include "cebed/tensor.hpp"

namespace cebed::train {

struct TrainConfig {
    double initial_lr = 1e-3;
    int batch_size = 512;
    int plateau_patience = 3;
    double plateau_factor = 0.5;
    double min_lr = 1e-5;
    int early_stop_patience = 10;
    int max_epochs = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

// "Improvement" everywhere means a strict decrease of the best seen
// validation loss by at least a 1e-7 relative margin.
constexpr double kImproveRelTol = 1e-7;

inline bool improved(double best, double loss) {
    return loss < best * (1.0 - kImproveRelTol);
}

// Halves the learning rate once the validation loss stalls for
// `patience` consecutive epochs, never dropping below min_lr.
class PlateauScheduler {
  public:
    PlateauScheduler(double lr, double factor, int patience, double min_lr)
        : lr_(lr), factor_(factor), min_lr_(min_lr), patience_(patience) {}

    double observe(double val_loss) {
        if (improved(best_, val_loss)) {
            best_ = val_loss;
            stall_ = 0;
        } else if (++stall_ >= patience_) {
            lr_ = std::max(lr_ * factor_, min_lr_);
            stall_ = 0;
        }
        return lr_;
    }

    double lr() const { return lr_; }

  private:
    double lr_, factor_, min_lr_;
    int patience_, stall_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

// Signals stop after `patience` consecutive epochs without improvement.
class EarlyStopper {
  public:
    explicit EarlyStopper(int patience) : patience_(patience) {}

    bool observe(double val_loss) {
        if (improved(best_, val_loss)) {
            best_ = val_loss;
            stall_ = 0;
            return false;
        }
        return ++stall_ >= patience_;
    }

  private:
    int patience_, stall_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

struct EpochStats {
    double train_loss = 0;
    double val_loss = 0;
    double lr = 0;
    double wall_seconds = 0;
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;  // 0-based index into epochs
    double best_val = std::numeric_limits<double>::infinity();
};

// Anything with an ordered parameter list and a forward-graph builder
// can be trained; the model zoo and the test toys both qualify.
class TrainableModel {
  public:
    virtual ~TrainableModel() = default;
    virtual std::vector<std::pair<std::string, nn::Tensor>>& trainable_params() = 0;
    virtual int build_forward(nn::Tape& tape, int input, bool trainable) const = 0;
};

// Matched per-sample inputs and targets.
struct TensorDataset {
    std::vector<nn::Tensor> inputs;
    std::vector<nn::Tensor> targets;
};

// Supervised MSE training with shuffled batches, plateau scheduling,
// early stopping and best-epoch checkpointing. The model is left holding
// the best-validation parameters.
TrainHistory fit(TrainableModel& model, const TensorDataset& train_set,
                 const TensorDataset& val_set, const TrainConfig& cfg);

// Validation MSE with 64-bit accumulation.
double evaluate(const TrainableModel& model, const TensorDataset& set, int batch_size);

void save_history_csv(const std::string& path, const TrainHistory& history);

}  // namespace cebed::train
