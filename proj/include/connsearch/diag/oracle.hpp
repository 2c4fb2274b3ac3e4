// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "connsearch/data/graph.hpp"
#include "connsearch/engine/search.hpp"
#include "connsearch/nas/architecture.hpp"
#include "connsearch/nas/supernet.hpp"

namespace connsearch::diag {

inline constexpr std::int64_t kEnumerationCap = 5000;

const std::vector<nas::Fusion>& all_fusions();

// Every distinct wiring of the block space: each block takes a nonempty
// predecessor subset, and blocks with two or more inputs additionally take a
// fusion from the subset (a single input needs no fusing and records the
// subset's lowest fusion). Unreachable blocks are pruned and equal results
// deduplicated; output is sorted by canonical key. The cap guards the raw
// pre-dedup count prod_j (2^j - 1)*|fusions|; exceeding it is a refusal that
// reports the count.
std::vector<nas::Architecture> enumerate_architectures(
    const nas::SupernetSpec& spec,
    const std::vector<nas::Fusion>& fusion_subset = all_fusions(),
    std::int64_t cap = kEnumerationCap);

struct OracleEntry {
    nas::Architecture architecture;
    double val_acc = 0.0;
    double test_acc = 0.0;
};

struct OracleResult {
    std::vector<OracleEntry> ranking;  // val accuracy descending, ties in canonical order
    std::int64_t total = 0;

    std::string to_json() const;
};

// Trains every enumerated architecture with the same cfg (one shared seed)
// and returns the full ranking.
OracleResult oracle_search(const nas::SupernetSpec& spec, const data::Graph& g,
                           const data::DataSplit& split, const engine::SearchConfig& cfg,
                           const std::vector<nas::Fusion>& fusion_subset = all_fusions());

}  // namespace connsearch::diag
