// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "connsearch/ad/tensor.hpp"
#include "connsearch/data/graph.hpp"
#include "connsearch/engine/search.hpp"
#include "connsearch/nas/architecture.hpp"

namespace connsearch::diag {

// Mean average distance: D_uv = 1 - cos(h_u, h_v), with the cosine taken as
// 0 when either row has zero norm. Each row averages D over its masked
// partners (u != v); MAD averages the rows that have at least one partner.
// The cosine is evaluated as sign(dot) * sqrt((dot/|u|^2) * (dot/|v|^2)) so
// that a common scale factor cancels inside the divisions; scaling all rows
// by the same constant leaves the result bitwise unchanged whenever the
// scaled entries and dot products are themselves exact.
double mad(const ad::Tensor& features, const std::function<bool(int, int)>& mask);

// All-pairs MAD over the listed nodes.
double mad(const ad::Tensor& features, const std::vector<int>& nodes);

struct MadRow {
    int depth = 0;
    double accuracy = 0.0;
    double mad = 0.0;
};

struct MadReport {
    std::vector<MadRow> rows;

    std::string to_json() const;
    std::string to_csv() const;  // header depth,accuracy,mad
};

// Produces the architecture to measure at a given depth.
using DepthMethod = std::function<nas::Architecture(int)>;

// For each depth L (every entry >= 2): build method(L), retrain it, record
// the test accuracy and the all-pairs MAD of the trained model's pre-head
// representation over the test nodes.
MadReport mad_depth_sweep(const data::Graph& g, const data::DataSplit& split,
                          const DepthMethod& method, const std::vector<int>& depths,
                          const engine::SearchConfig& cfg);

}  // namespace connsearch::diag
