// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#include "cebed/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "cebed/models.hpp"
#include "cebed/rng.hpp"

namespace cebed::train {

void TrainConfig::validate() const {
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
        throw std::invalid_argument("TrainConfig: plateau_factor must be in (0,1)");
    if (!(min_lr > 0.0)) throw std::invalid_argument("TrainConfig: min_lr must be > 0");
    if (plateau_patience < 1 || early_stop_patience < 1)
        throw std::invalid_argument("TrainConfig: patiences must be >= 1");
    if (batch_size < 1 || max_epochs < 1 || initial_lr <= 0.0)
        throw std::invalid_argument("TrainConfig: bad batch size, epochs or learning rate");
}

namespace {

nn::Tensor stack_rows(const std::vector<nn::Tensor>& items, const std::vector<int>& order,
                      std::size_t begin, std::size_t end) {
    std::vector<nn::Tensor> chunk;
    chunk.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i) chunk.push_back(items[order[i]]);
    return zoo::stack(chunk);
}

}  // namespace

double evaluate(const TrainableModel& model, const TensorDataset& set, int batch_size) {
    if (set.inputs.empty()) throw std::invalid_argument("evaluate: empty set");
    std::vector<int> order(set.inputs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    double sq_sum = 0.0;
    std::size_t count = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t stop = std::min(order.size(), start + batch_size);
        nn::Tape tape;
        const int in = tape.input(stack_rows(set.inputs, order, start, stop));
        const int out = model.build_forward(tape, in, /*trainable=*/false);
        const nn::Tensor target = stack_rows(set.targets, order, start, stop);
        const nn::Tensor& y = tape.value(out);
        if (y.v.size() != target.v.size()) throw std::invalid_argument("evaluate: shape mismatch");
        for (std::size_t i = 0; i < y.v.size(); ++i) {
            const double d = static_cast<double>(y.v[i]) - static_cast<double>(target.v[i]);
            sq_sum += d * d;
        }
        count += y.v.size();
    }
    return sq_sum / static_cast<double>(count);
}

TrainHistory fit(TrainableModel& model, const TensorDataset& train_set,
                 const TensorDataset& val_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.inputs.empty() || val_set.inputs.empty())
        throw std::invalid_argument("fit: empty split");
    if (train_set.inputs.size() != train_set.targets.size() ||
        val_set.inputs.size() != val_set.targets.size())
        throw std::invalid_argument("fit: inputs/targets length mismatch");

    auto& params = model.trainable_params();
    nn::AdamState adam;
    adam.lr = cfg.initial_lr;
    PlateauScheduler sched(cfg.initial_lr, cfg.plateau_factor, cfg.plateau_patience, cfg.min_lr);
    EarlyStopper stopper(cfg.early_stop_patience);

    TrainHistory history;
    std::vector<std::pair<std::string, nn::Tensor>> best_params = params;

    const std::size_t n = train_set.inputs.size();
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const double lr_this_epoch = sched.lr();
        adam.lr = lr_this_epoch;

        // Deterministic shuffle per (seed, epoch).
        Rng rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[rng.below(i + 1)]);

        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        int batch_index = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t stop = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
            nn::Tape tape;
            const int in = tape.input(stack_rows(train_set.inputs, order, start, stop));
            const int target = tape.input(stack_rows(train_set.targets, order, start, stop));
            double loss_val = 0.0;
            try {
                const int out = model.build_forward(tape, in, /*trainable=*/true);
                const int loss = tape.mse_loss(out, target);
                loss_val = static_cast<double>(tape.value(loss).v[0]);
                if (!std::isfinite(loss_val)) throw std::runtime_error("non-finite loss");
                tape.backward(loss);
            } catch (const std::runtime_error& e) {
                throw std::runtime_error("fit: " + std::string(e.what()) + " at epoch " +
                                         std::to_string(epoch) + " batch " +
                                         std::to_string(batch_index));
            }

            std::vector<nn::Tensor*> prm;
            std::vector<const nn::Tensor*> grd;
            const auto& tape_params = tape.params();
            if (tape_params.size() != params.size())
                throw std::logic_error("fit: tape/model parameter mismatch");
            for (std::size_t i = 0; i < params.size(); ++i) {
                prm.push_back(&params[i].second);
                grd.push_back(&tape.grad(tape_params[i].second));
            }
            nn::adam_step(prm, grd, adam);

            loss_sum += loss_val * static_cast<double>(stop - start);
            loss_count += stop - start;
        }

        const double val_loss = evaluate(model, val_set, cfg.batch_size);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.epochs.push_back(
            {loss_sum / static_cast<double>(loss_count), val_loss, lr_this_epoch, wall});

        if (improved(history.best_val, val_loss)) {
            history.best_val = val_loss;
            history.best_epoch = epoch - 1;
            best_params = params;
        }
        sched.observe(val_loss);
        if (stopper.observe(val_loss)) break;
    }

    params = best_params;
    return history;
}

void save_history_csv(const std::string& path, const TrainHistory& history) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("history: cannot open " + path);
    os << "epoch,train_loss,val_loss,lr,wall_seconds\n";
    for (std::size_t i = 0; i < history.epochs.size(); ++i) {
        const auto& e = history.epochs[i];
        os << (i + 1) << "," << e.train_loss << "," << e.val_loss << "," << e.lr << ","
           << e.wall_seconds << "\n";
    }
}

}  // namespace cebed::train
