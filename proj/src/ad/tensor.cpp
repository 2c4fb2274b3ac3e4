// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/ad/tensor.hpp"

#include <cmath>

namespace connsearch::ad {

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<std::int64_t>(rows.size());
    if (r == 0) throw ShapeError("from_rows: empty row list");
    const auto c = static_cast<std::int64_t>(rows.begin()->size());
    Tensor t(r, c);
    std::int64_t i = 0;
    for (const auto& row : rows) {
        if (static_cast<std::int64_t>(row.size()) != c)
            throw ShapeError("from_rows: ragged rows");
        std::int64_t j = 0;
        for (double v : row) t.at(i, j++) = v;
        ++i;
    }
    return t;
}

Tensor Tensor::glorot(std::int64_t rows, std::int64_t cols, Rng& rng) {
    Tensor t(rows, cols);
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (auto& v : t.values()) v = rng.uniform(-limit, limit);
    t.set_requires_grad(true);
    return t;
}

}  // namespace connsearch::ad
