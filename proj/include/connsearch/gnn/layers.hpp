// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "connsearch/ad/tape.hpp"
#include "connsearch/data/graph.hpp"

namespace connsearch::gnn {

enum class Activation { kRelu, kTanh, kElu, kSigmoid, kNone };

ad::Tensor apply_activation(ad::Tape& tape, const ad::Tensor& x, Activation act);

// 2-layer MLP, no biases: act(H W0) W1, with the activation applied again
// after W1 unless linear_output is set (the logits head stays linear).
struct MlpBlockParams {
    ad::Tensor W0;  // d_in x d_hidden
    ad::Tensor W1;  // d_hidden x d_out
    Activation activation = Activation::kRelu;
    bool linear_output = false;

    std::vector<ad::Tensor> params() const { return {W0, W1}; }
};

MlpBlockParams make_mlp(std::int64_t d_in, std::int64_t d_hidden, std::int64_t d_out,
                        Activation act, bool linear_output, ad::Rng& rng);

ad::Tensor mlp2_forward(ad::Tape& tape, const MlpBlockParams& p, const ad::Tensor& H);

// GraphSAGE with the mean aggregator:
//   out_v = relu(concat(h_v, mean_{u in N(v) minus v} h_u) W + bias)
// Nodes whose neighborhood is only themselves use a zero neighbor mean.
struct SageParams {
    ad::Tensor W;     // 2d x d
    ad::Tensor bias;  // 1 x d

    std::vector<ad::Tensor> params() const { return {W, bias}; }
};

SageParams make_sage(std::int64_t d, ad::Rng& rng);

// Mean over the non-self neighbors of each node; zero row when there are
// none. Differentiable (constant linear map). The graph passed to the
// message-passing layers must outlive the tape they record onto.
ad::Tensor neighbor_mean(ad::Tape& tape, const data::Graph& g, const ad::Tensor& H);

ad::Tensor sage_forward(ad::Tape& tape, const SageParams& p, const data::Graph& g,
                        const ad::Tensor& H);

// Graph attention, self-inclusive neighborhoods, one softmax per destination:
//   z = H W;  e_uv = leaky_relu(a_src.z_u + a_dst.z_v);  alpha = softmax_u
//   out_v = elu(sum_u alpha_uv z_u), averaged over heads.
struct GatParams {
    std::vector<ad::Tensor> W;      // per head, d x d
    std::vector<ad::Tensor> a_src;  // per head, d x 1
    std::vector<ad::Tensor> a_dst;  // per head, d x 1
    double leaky_slope = 0.2;

    std::vector<ad::Tensor> params() const {
        std::vector<ad::Tensor> out;
        for (std::size_t h = 0; h < W.size(); ++h) {
            out.push_back(W[h]);
            out.push_back(a_src[h]);
            out.push_back(a_dst[h]);
        }
        return out;
    }
};

GatParams make_gat(std::int64_t d, int heads, double leaky_slope, ad::Rng& rng);

// attn_out, when given, receives one coefficient list per node, aligned with
// g.neighborhoods and averaged over heads.
ad::Tensor gat_forward(ad::Tape& tape, const GatParams& p, const data::Graph& g,
                       const ad::Tensor& H,
                       std::vector<std::vector<double>>* attn_out = nullptr);

}  // namespace connsearch::gnn
