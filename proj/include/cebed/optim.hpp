// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <stdexcept>
#include <vector>

#include "cebed/tensor.hpp"

namespace cebed::nn {

// Bias-corrected Adam. Moment buffers are allocated on the first step
// and stay aligned with the parameter list by index.
template <class T>
struct AdamStateT {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<std::vector<T>> m, v;
};

using AdamState = AdamStateT<float>;

template <class T>
void adam_step(std::vector<TensorT<T>*> params, const std::vector<const TensorT<T>*>& grads,
               AdamStateT<T>& state) {
    if (params.size() != grads.size()) throw std::invalid_argument("adam_step: param/grad mismatch");
    if (state.m.empty()) {
        state.m.resize(params.size());
        state.v.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            state.m[i].assign(params[i]->numel(), T(0));
            state.v[i].assign(params[i]->numel(), T(0));
        }
    }
    if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: state size mismatch");

    ++state.step;
    const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
    const T corr1 = T(1) - static_cast<T>(std::pow(state.beta1, state.step));
    const T corr2 = T(1) - static_cast<T>(std::pow(state.beta2, state.step));
    const T lr = static_cast<T>(state.lr), eps = static_cast<T>(state.eps);

    for (std::size_t i = 0; i < params.size(); ++i) {
        TensorT<T>& p = *params[i];
        const TensorT<T>& g = *grads[i];
        if (g.numel() != p.numel() || state.m[i].size() != p.numel())
            throw std::invalid_argument("adam_step: shape mismatch");
        T* m = state.m[i].data();
        T* v = state.v[i].data();
        for (std::size_t j = 0; j < p.numel(); ++j) {
            m[j] = b1 * m[j] + (T(1) - b1) * g.v[j];
            v[j] = b2 * v[j] + (T(1) - b2) * g.v[j] * g.v[j];
            const T mhat = m[j] / corr1;
            const T vhat = v[j] / corr2;
            p.v[j] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

}  // namespace cebed::nn
