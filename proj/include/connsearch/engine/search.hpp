// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "connsearch/ad/adam.hpp"
#include "connsearch/ad/rng.hpp"
#include "connsearch/data/graph.hpp"
#include "connsearch/nas/architecture.hpp"
#include "connsearch/nas/supernet.hpp"

namespace connsearch::engine {

// One knob set covers both phases: `epochs` drives the search,
// `retrain_epochs` the from-scratch training of discrete architectures.
// Weight decay applies to operation weights only, never to alphas.
struct SearchConfig {
    std::int64_t epochs = 200;
    std::int64_t retrain_epochs = 300;
    double lr_w = 5e-3;
    double lr_alpha = 3e-3;
    double weight_decay_w = 5e-4;
    double lambda_start = 1.0;
    double lambda_end = 0.05;
    std::uint64_t seed = 0;
    nas::GnnKind gnn_kind = nas::GnnKind::kSage;
    std::int64_t n_gnn_blocks = 4;
    std::int64_t hidden_dim = 64;
    double dropout = 0.0;
    std::int64_t patience = 30;

    void validate() const;  // throws ArgumentError on out-of-range values
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
    double lambda = 0.0;
};

struct SearchReport {
    std::vector<EpochRecord> epochs;
    nas::Architecture architecture;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    std::string to_json() const;
};

// Geometric interpolation from lambda_start (epoch 0) to lambda_end
// (epoch epochs-1); a single-epoch schedule stays at lambda_start.
double lambda_at(const SearchConfig& cfg, std::int64_t epoch);

// Mutable context of one search: the supernet, the Gumbel/dropout streams
// and one Adam state per parameter group.
struct SearchRun {
    nas::Supernet net;
    ad::Rng gumbel;
    ad::Rng dropout;
    ad::AdamState w_opt;
    ad::AdamState alpha_opt;
    std::vector<ad::Tensor> w_params;
    std::vector<ad::Tensor> alpha_params;

    SearchRun(const data::Graph& g, const SearchConfig& cfg);
};

// First-order alternation: a sample-mode forward scored on the train mask
// updates w, then a fresh forward scored on the val mask updates alpha.
// Throws NumericError naming the epoch when either loss turns non-finite.
EpochRecord alternate_step(SearchRun& run, const data::Graph& g, const data::DataSplit& split,
                           const SearchConfig& cfg, std::int64_t epoch);

std::pair<nas::Architecture, SearchReport> run_search(const data::Graph& g,
                                                      const data::DataSplit& split,
                                                      const SearchConfig& cfg);

// Fixed-connection reference architectures expressed over cfg-sized block
// space: stack2, stack4, resgcn4, densegcn4, jknet4.
nas::Architecture build_baseline(const std::string& name, const SearchConfig& cfg);

}  // namespace connsearch::engine
