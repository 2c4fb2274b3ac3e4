// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "connsearch/data/graph.hpp"
#include "connsearch/engine/search.hpp"
#include "connsearch/nas/architecture.hpp"
#include "connsearch/nas/derived.hpp"

namespace connsearch::engine {

struct RetrainEpoch {
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_acc = 0.0;
    double test_acc = 0.0;  // recorded for reporting only, never steers training
};

// A discrete architecture trained from scratch. The held model carries the
// weights of the best-validation-accuracy epoch; test_acc is the test
// accuracy at that same epoch (reported exactly once).
struct TrainedModel {
    nas::Architecture architecture;
    std::shared_ptr<nas::DerivedModel> model;
    std::vector<RetrainEpoch> history;
    double best_val_acc = 0.0;
    double test_acc = 0.0;
    std::int64_t best_epoch = 0;
    std::int64_t epochs_run = 0;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    std::string metrics_json() const;  // per-epoch test accuracy stays out
};

// Adam on the derived network's weights with cross-entropy on the train
// mask; early stopping watches validation loss with cfg.patience.
TrainedModel train_architecture(const nas::Architecture& arch, const data::Graph& g,
                                const data::DataSplit& split, const SearchConfig& cfg);

}  // namespace connsearch::engine
