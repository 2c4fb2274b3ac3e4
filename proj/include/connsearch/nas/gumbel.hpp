// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "connsearch/ad/tape.hpp"

namespace connsearch::nas {

// Relaxation knobs for one forward pass. Sample mode draws fresh Gumbel
// noise from rng for every gate and selector; argmax mode is deterministic
// and produces exact one-hot weights (ties to the lowest index).
struct GumbelConfig {
    enum class Mode { kSample, kArgmax };
    double lambda = 1.0;
    Mode mode = Mode::kSample;
    ad::Rng* rng = nullptr;  // required in sample mode
};

// Row of mixing weights over the candidate operations behind `alpha` (1 x K).
// Sample mode: softmax((log_softmax(alpha) + G) / lambda) with
// G_k = -log(-log U_k); the result stays on the tape so gradients reach
// alpha. Argmax mode returns a constant one-hot off the tape.
ad::Tensor gumbel_softmax(ad::Tape& tape, const ad::Tensor& alpha, const GumbelConfig& cfg);

}  // namespace connsearch::nas
