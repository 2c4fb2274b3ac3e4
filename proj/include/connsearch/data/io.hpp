// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include "connsearch/data/graph.hpp"

namespace connsearch::data {

// Directory layout:
//   edges.tsv      src<TAB>dst per line, 0-based ids, '#' lines ignored
//   features.csv   row i = comma-separated reals for node i
//   labels.csv     row i = integer class of node i
//   splits.json    optional {"train": [...], "val": [...], "test": [...]}
std::pair<Graph, std::optional<DataSplit>> load_dataset(const std::filesystem::path& dir);

void save_dataset(const Graph& g, const std::filesystem::path& dir,
                  const DataSplit* split = nullptr);

}  // namespace connsearch::data
