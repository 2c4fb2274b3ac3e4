// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "connsearch/ad/tensor.hpp"

namespace connsearch::engine {

// Fraction of masked nodes whose argmax logit (ties to the lowest class)
// matches the label.
double accuracy(const ad::Tensor& logits, const std::vector<int>& labels,
                const std::vector<int>& mask);

}  // namespace connsearch::engine
