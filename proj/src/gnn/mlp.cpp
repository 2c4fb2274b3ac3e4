// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/gnn/layers.hpp"

namespace connsearch::gnn {

ad::Tensor apply_activation(ad::Tape& tape, const ad::Tensor& x, Activation act) {
    switch (act) {
        case Activation::kRelu: return tape.relu(x);
        case Activation::kTanh: return tape.tanh(x);
        case Activation::kElu: return tape.elu(x);
        case Activation::kSigmoid: return tape.sigmoid(x);
        case Activation::kNone: return x;
    }
    return x;
}

MlpBlockParams make_mlp(std::int64_t d_in, std::int64_t d_hidden, std::int64_t d_out,
                        Activation act, bool linear_output, ad::Rng& rng) {
    MlpBlockParams p;
    p.W0 = ad::Tensor::glorot(d_in, d_hidden, rng);
    p.W1 = ad::Tensor::glorot(d_hidden, d_out, rng);
    p.activation = act;
    p.linear_output = linear_output;
    return p;
}

ad::Tensor mlp2_forward(ad::Tape& tape, const MlpBlockParams& p, const ad::Tensor& H) {
    ad::Tensor hidden = apply_activation(tape, tape.matmul(H, p.W0), p.activation);
    ad::Tensor out = tape.matmul(hidden, p.W1);
    return p.linear_output ? out : apply_activation(tape, out, p.activation);
}

}  // namespace connsearch::gnn
