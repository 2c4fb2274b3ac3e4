// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "connsearch/ad/tensor.hpp"

namespace connsearch::ad {

// Per-parameter Adam moments, keyed by tensor storage identity. One state
// object lives for the duration of a training run.
struct AdamState {
    struct Moments {
        std::vector<double> m;
        std::vector<double> v;
        std::int64_t t = 0;
    };
    std::unordered_map<const void*, Moments> slots;
};

// Standard Adam update with bias correction. Every parameter must carry a
// populated gradient buffer (state error otherwise). weight_decay adds an L2
// term to the gradient before the moment update. Gradients of the stepped
// parameters are zeroed afterward.
void adam_step(std::vector<Tensor>& params, double lr, double beta1, double beta2, double eps,
               AdamState& state, double weight_decay = 0.0);

}  // namespace connsearch::ad
