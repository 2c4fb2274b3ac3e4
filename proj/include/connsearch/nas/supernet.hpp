// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "connsearch/ad/rng.hpp"
#include "connsearch/ad/tape.hpp"
#include "connsearch/ad/tensor.hpp"
#include "connsearch/data/graph.hpp"
#include "connsearch/gnn/layers.hpp"
#include "connsearch/nas/architecture.hpp"
#include "connsearch/nas/fusion.hpp"
#include "connsearch/nas/gumbel.hpp"

namespace connsearch::nas {

struct SupernetSpec {
    std::int64_t n_gnn_blocks = 4;  // K; blocks are 0 (input MLP), 1..K (GNN), K+1 (output)
    std::int64_t hidden_dim = 64;
    GnnKind gnn_kind = GnnKind::kSage;
    std::int64_t input_dim = 0;
    std::int64_t n_classes = 0;
};

// One ZERO/IDENTITY gate per ordered pair (i, j) with 0 <= i < j <= K+1.
struct EdgeGate {
    int from = 0;
    int to = 0;
    ad::Tensor alpha;  // 1x2 logits, index 0 = ZERO, index 1 = IDENTITY
};

struct FusionSelector {
    int block = 0;
    ad::Tensor alpha;  // 1x6 logits over the fusion set
};

// The relaxed search space: every candidate connection carries a gate, every
// block carries a fusion selector, and a forward pass mixes candidates with
// Gumbel-Softmax weights (or hard one-hots in argmax mode).
class Supernet {
public:
    Supernet(SupernetSpec spec, std::uint64_t seed);

    const SupernetSpec& spec() const { return spec_; }

    // Full-batch logits [N x C]. In sample mode fresh Gumbel noise is drawn
    // per gate and per selector on every call; argmax mode is deterministic
    // and touches no RNG. Dropout (if > 0) is applied to each GNN block
    // output and needs an RNG.
    ad::Tensor forward(ad::Tape& tape, const data::Graph& g, const GumbelConfig& cfg,
                       double dropout = 0.0, ad::Rng* dropout_rng = nullptr) const;

    Architecture derive() const;

    // Overwrites all alphas with +/-magnitude logits so that argmax-mode
    // evaluation reproduces exactly the discrete architecture `a`.
    void set_alphas_from(const Architecture& a, double magnitude = 20.0);

    std::vector<ad::Tensor> weight_params() const;  // w: MLPs, GNN layers, fusion bundles
    std::vector<ad::Tensor> alpha_params() const;   // architecture parameters
    // Stable name -> tensor map covering both groups; names shared with
    // DerivedModel so weights can be copied across.
    std::vector<std::pair<std::string, ad::Tensor>> named_params() const;

    EdgeGate& gate(int from, int to);
    const EdgeGate& gate(int from, int to) const;
    FusionSelector& selector(int block);
    const FusionSelector& selector(int block) const;

private:
    std::int64_t gate_index(int from, int to) const;

    SupernetSpec spec_;
    gnn::MlpBlockParams input_block_;    // block 0
    std::vector<gnn::SageParams> sage_;  // GNN blocks (gnn_kind == sage)
    std::vector<gnn::GatParams> gat_;    // GNN blocks (gnn_kind == gat)
    std::vector<FusionParams> fusion_;   // blocks 1..K+1
    gnn::MlpBlockParams head_;           // output block
    std::vector<EdgeGate> gates_;
    std::vector<FusionSelector> selectors_;
};

}  // namespace connsearch::nas
