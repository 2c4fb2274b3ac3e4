// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "connsearch/ad/tape.hpp"
#include "connsearch/nas/architecture.hpp"
#include "connsearch/nas/gumbel.hpp"

namespace connsearch::nas {

// Trainable operation weights behind the parameterized fusion candidates of
// one block. CONCAT owns a single (max_inputs*d x d) projection applied to
// the zero-padded concatenation, so one tensor serves every input count.
// The LSTM cell is width d with gate order (input, forget, cell, output).
struct FusionParams {
    std::int64_t d = 0;
    std::int64_t max_inputs = 0;
    ad::Tensor concat_proj;  // (max_inputs*d) x d
    ad::Tensor lstm_w_ih;    // d x 4d
    ad::Tensor lstm_w_hh;    // d x 4d
    ad::Tensor lstm_bias;    // 1 x 4d
    ad::Tensor att_w;        // d x d
    ad::Tensor att_q;        // d x 1

    std::vector<ad::Tensor> params() const {
        return {concat_proj, lstm_w_ih, lstm_w_hh, lstm_bias, att_w, att_q};
    }
};

FusionParams make_fusion_params(std::int64_t d, std::int64_t max_inputs, ad::Rng& rng);

// One fusion candidate over same-shape inputs ordered by ascending source
// block. Output width is always d.
ad::Tensor fusion_apply(ad::Tape& tape, Fusion kind, const std::vector<ad::Tensor>& inputs,
                        const FusionParams& p);

// Eq-style relaxed fusion: sum_k c_k * fusion_apply(k, inputs) with the
// weight row c (1 x 6). Exact one-hot rows evaluate only the winner.
ad::Tensor fusion_mix_with(ad::Tape& tape, const ad::Tensor& weights,
                           const std::vector<ad::Tensor>& inputs, const FusionParams& p);

// Scales x by the IDENTITY weight of the (ZERO, IDENTITY) row c. An exact
// one-hot ZERO row yields the exact zero tensor; an exact IDENTITY row
// yields x itself.
ad::Tensor edge_mix_with(ad::Tape& tape, const ad::Tensor& weights, const ad::Tensor& x);

}  // namespace connsearch::nas
