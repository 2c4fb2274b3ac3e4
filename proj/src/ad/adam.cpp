// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/ad/adam.hpp"

#include <cmath>

#include "connsearch/errors.hpp"

namespace connsearch::ad {

void adam_step(std::vector<Tensor>& params, double lr, double beta1, double beta2, double eps,
               AdamState& state, double weight_decay) {
    for (auto& p : params) {
        if (!p.has_grad())
            throw StateError("adam_step: parameter " + p.shape_str() +
                             " has no gradient; run backward first");
        auto& slot = state.slots[p.id()];
        auto& vals = p.values();
        auto& grads = p.grad();
        if (slot.m.empty()) {
            slot.m.assign(vals.size(), 0.0);
            slot.v.assign(vals.size(), 0.0);
        }
        slot.t += 1;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(slot.t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(slot.t));
        for (std::size_t k = 0; k < vals.size(); ++k) {
            const double g = grads[k] + weight_decay * vals[k];
            slot.m[k] = beta1 * slot.m[k] + (1.0 - beta1) * g;
            slot.v[k] = beta2 * slot.v[k] + (1.0 - beta2) * g * g;
            const double mhat = slot.m[k] / bc1;
            const double vhat = slot.v[k] / bc2;
            vals[k] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
        p.zero_grad();
    }
}

}  // namespace connsearch::ad
