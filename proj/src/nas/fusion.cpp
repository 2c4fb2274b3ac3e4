// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/nas/fusion.hpp"

#include "connsearch/errors.hpp"

namespace connsearch::nas {

namespace {

using ad::Tape;
using ad::Tensor;

Tensor concat_fusion(Tape& tape, const std::vector<Tensor>& inputs, const FusionParams& p) {
    std::vector<Tensor> parts = inputs;
    const auto used = static_cast<std::int64_t>(inputs.size()) * p.d;
    const std::int64_t pad = p.max_inputs * p.d - used;
    if (pad < 0)
        throw ShapeError("fusion_apply: " + std::to_string(inputs.size()) +
                         " inputs exceed the concat capacity of " + std::to_string(p.max_inputs));
    if (pad > 0) parts.push_back(Tensor(inputs[0].rows(), pad));
    return tape.matmul(tape.concat(parts, 1), p.concat_proj);
}

Tensor lstm_fusion(Tape& tape, const std::vector<Tensor>& inputs, const FusionParams& p) {
    const std::int64_t n = inputs[0].rows(), d = p.d;
    Tensor h(n, d);
    Tensor c(n, d);
    for (const auto& x : inputs) {
        Tensor z = tape.add(tape.add(tape.matmul(x, p.lstm_w_ih), tape.matmul(h, p.lstm_w_hh)),
                            p.lstm_bias);
        Tensor gi = tape.sigmoid(tape.slice_cols(z, 0, d));
        Tensor gf = tape.sigmoid(tape.slice_cols(z, d, d));
        Tensor gc = tape.tanh(tape.slice_cols(z, 2 * d, d));
        Tensor go = tape.sigmoid(tape.slice_cols(z, 3 * d, d));
        c = tape.add(tape.mul(gf, c), tape.mul(gi, gc));
        h = tape.mul(go, tape.tanh(c));
    }
    return h;
}

Tensor att_fusion(Tape& tape, const std::vector<Tensor>& inputs, const FusionParams& p) {
    std::vector<Tensor> scores;
    scores.reserve(inputs.size());
    for (const auto& x : inputs)
        scores.push_back(tape.matmul(tape.tanh(tape.matmul(x, p.att_w)), p.att_q));  // N x 1
    Tensor weights = tape.softmax(tape.concat(scores, 1), 1);  // N x m
    Tensor out = tape.mul(tape.slice_cols(weights, 0, 1), inputs[0]);
    for (std::size_t i = 1; i < inputs.size(); ++i)
        out = tape.add(out, tape.mul(tape.slice_cols(weights, static_cast<std::int64_t>(i), 1),
                                     inputs[i]));
    return out;
}

}  // namespace

FusionParams make_fusion_params(std::int64_t d, std::int64_t max_inputs, ad::Rng& rng) {
    FusionParams p;
    p.d = d;
    p.max_inputs = max_inputs;
    p.concat_proj = Tensor::glorot(max_inputs * d, d, rng);
    p.lstm_w_ih = Tensor::glorot(d, 4 * d, rng);
    p.lstm_w_hh = Tensor::glorot(d, 4 * d, rng);
    p.lstm_bias = Tensor(1, 4 * d);
    p.lstm_bias.set_requires_grad();
    p.att_w = Tensor::glorot(d, d, rng);
    p.att_q = Tensor::glorot(d, 1, rng);
    return p;
}

Tensor fusion_apply(Tape& tape, Fusion kind, const std::vector<Tensor>& inputs,
                    const FusionParams& p) {
    if (inputs.empty()) throw ArgumentError("fusion_apply: empty input list");
    for (const auto& x : inputs)
        if (x.cols() != p.d)
            throw ShapeError("fusion_apply: input width " + std::to_string(x.cols()) +
                             ", expected " + std::to_string(p.d));
    switch (kind) {
        case Fusion::kSum: return tape.stack_reduce(Tape::Reduce::kSum, inputs);
        case Fusion::kMean: return tape.stack_reduce(Tape::Reduce::kMean, inputs);
        case Fusion::kMax: return tape.stack_reduce(Tape::Reduce::kMax, inputs);
        case Fusion::kConcat: return concat_fusion(tape, inputs, p);
        case Fusion::kLstm: return lstm_fusion(tape, inputs, p);
        case Fusion::kAtt: return att_fusion(tape, inputs, p);
    }
    throw ArgumentError("fusion_apply: unknown fusion kind");
}

Tensor fusion_mix_with(Tape& tape, const Tensor& weights, const std::vector<Tensor>& inputs,
                       const FusionParams& p) {
    if (weights.rows() != 1 || weights.cols() != kNumFusions)
        throw ShapeError("fusion_mix: weight row must be 1x" + std::to_string(kNumFusions) +
                         ", got " + weights.shape_str());
    // exact one-hot rows (argmax mode) reduce to the winning candidate
    int winner = -1;
    bool onehot = true;
    for (int k = 0; k < kNumFusions && onehot; ++k) {
        const double c = weights.at(0, k);
        if (c == 1.0 && winner < 0)
            winner = k;
        else if (c != 0.0)
            onehot = false;
    }
    if (onehot && winner >= 0)
        return fusion_apply(tape, static_cast<Fusion>(winner), inputs, p);

    Tensor out;
    for (int k = 0; k < kNumFusions; ++k) {
        Tensor term = tape.scale(fusion_apply(tape, static_cast<Fusion>(k), inputs, p),
                                 tape.element(weights, 0, k));
        out = k == 0 ? term : tape.add(out, term);
    }
    return out;
}

Tensor edge_mix_with(Tape& tape, const Tensor& weights, const Tensor& x) {
    if (weights.rows() != 1 || weights.cols() != 2)
        throw ShapeError("edge_mix: weight row must be 1x2, got " + weights.shape_str());
    const double keep = weights.at(0, 1);
    if (weights.at(0, 0) == 1.0 && keep == 0.0) return Tensor(x.rows(), x.cols());
    if (weights.at(0, 0) == 0.0 && keep == 1.0) return x;
    return tape.scale(x, tape.element(weights, 0, 1));
}

}  // namespace connsearch::nas
