// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/engine/metrics.hpp"

#include "connsearch/errors.hpp"

namespace connsearch::engine {

double accuracy(const ad::Tensor& logits, const std::vector<int>& labels,
                const std::vector<int>& mask) {
    if (mask.empty()) throw ArgumentError("accuracy: empty mask");
    std::int64_t hits = 0;
    for (int v : mask) {
        if (v < 0 || v >= logits.rows() || static_cast<std::size_t>(v) >= labels.size())
            throw ArgumentError("accuracy: node " + std::to_string(v) + " out of range");
        std::int64_t best = 0;
        for (std::int64_t c = 1; c < logits.cols(); ++c)
            if (logits.at(v, c) > logits.at(v, best)) best = c;
        if (best == labels[static_cast<std::size_t>(v)]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(mask.size());
}

}  // namespace connsearch::engine
