// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "connsearch/ad/tensor.hpp"

namespace connsearch::data {

// Undirected node-classification dataset. Edges are stored canonically as
// (min, max), sorted and duplicate-free. neighborhoods[v] is the sorted
// first-order neighborhood of v including v itself.
struct Graph {
    std::int64_t n_nodes = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> edges;
    ad::Tensor features;  // N x d
    std::vector<int> labels;
    int n_classes = 0;
    std::vector<std::vector<std::int32_t>> neighborhoods;
};

struct DataSplit {
    std::vector<int> train;
    std::vector<int> val;
    std::vector<int> test;
};

// Canonicalizes edges (dedup, drop u==v) and rebuilds the self-inclusive
// sorted neighborhoods. Callers mutate edges, then call this.
void canonicalize(Graph& g);

// Per-class stratified split: within each class the node order is shuffled
// by the seed and counts follow the ratios to within one node. Every class
// needs at least 3 labeled nodes.
DataSplit split_nodes(const Graph& g, double train_ratio, double val_ratio, double test_ratio,
                      std::uint64_t seed);

// Stochastic block model: nodes_per_community nodes in each of `communities`
// blocks, edge probability p_in inside a block and p_out across blocks.
// Features are the one-hot community prototype of width feature_dim plus
// Gaussian noise of scale feature_noise; labels are community ids.
Graph generate_sbm(int communities, int nodes_per_community, double p_in, double p_out,
                   int feature_dim, double feature_noise, std::uint64_t seed);

// Copy of g with each feature row divided by its L1 norm; zero rows pass
// through unchanged.
Graph row_normalize_features(const Graph& g);

}  // namespace connsearch::data
