// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/nas/gumbel.hpp"

#include <cmath>

#include "connsearch/errors.hpp"

namespace connsearch::nas {

ad::Tensor gumbel_softmax(ad::Tape& tape, const ad::Tensor& alpha, const GumbelConfig& cfg) {
    if (cfg.lambda <= 0.0)
        throw ArgumentError("gumbel_softmax: lambda must be positive, got " +
                            std::to_string(cfg.lambda));
    if (alpha.rows() != 1) throw ShapeError("gumbel_softmax: alpha must be a row, got " + alpha.shape_str());

    if (cfg.mode == GumbelConfig::Mode::kArgmax) {
        std::int64_t best = 0;
        for (std::int64_t k = 1; k < alpha.cols(); ++k)
            if (alpha.at(0, k) > alpha.at(0, best)) best = k;
        ad::Tensor onehot(1, alpha.cols());
        onehot.at(0, best) = 1.0;
        return onehot;
    }

    if (!cfg.rng) throw ArgumentError("gumbel_softmax: sample mode needs an rng");
    ad::Tensor noise(1, alpha.cols());
    for (std::int64_t k = 0; k < alpha.cols(); ++k) {
        const double u = cfg.rng->uniform_open();
        noise.at(0, k) = -std::log(-std::log(u));
    }
    ad::Tensor shifted = tape.scale_const(tape.add(tape.log_softmax(alpha, 1), noise),
                                          1.0 / cfg.lambda);
    return tape.softmax(shifted, 1);
}

}  // namespace connsearch::nas
