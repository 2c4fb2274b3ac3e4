// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
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

namespace connsearch::nas {

// Standalone network for one discrete architecture, retrained from scratch.
// Fresh parameters are allocated only for retained blocks, and only the
// fusion tensors the block's fusion op actually consumes, so params() is
// exactly the set of tensors a training step must touch.
class DerivedModel {
public:
    DerivedModel(Architecture arch, std::int64_t input_dim, std::int64_t n_classes,
                 std::uint64_t seed);

    const Architecture& arch() const { return arch_; }

    // Logits [N x C]. pre_head, when given, receives the output block's fused
    // input (the representation the smoothness diagnostics run on).
    ad::Tensor forward(ad::Tape& tape, const data::Graph& g, double dropout = 0.0,
                       ad::Rng* dropout_rng = nullptr, ad::Tensor* pre_head = nullptr) const;

    std::vector<ad::Tensor> params() const;
    // Names are shared with the supernet so searched weights can be copied in.
    std::vector<std::pair<std::string, ad::Tensor>> named_params() const;

private:
    Architecture arch_;
    std::int64_t input_dim_ = 0;
    std::int64_t n_classes_ = 0;
    gnn::MlpBlockParams input_block_;
    std::map<int, gnn::SageParams> sage_;
    std::map<int, gnn::GatParams> gat_;
    std::map<int, FusionParams> fusion_;  // per retained block; unused kinds left empty
    gnn::MlpBlockParams head_;
};

// Copies values into every dst tensor whose name also appears in src.
// Returns how many tensors were copied.
std::size_t copy_shared_params(const std::vector<std::pair<std::string, ad::Tensor>>& src,
                               const std::vector<std::pair<std::string, ad::Tensor>>& dst);

}  // namespace connsearch::nas
