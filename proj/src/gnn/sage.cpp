// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/gnn/layers.hpp"

#include "connsearch/errors.hpp"

namespace connsearch::gnn {

ad::Tensor neighbor_mean(ad::Tape& tape, const data::Graph& g, const ad::Tensor& H) {
    if (H.rows() != g.n_nodes)
        throw ShapeError("neighbor_mean: " + H.shape_str() + " rows vs " +
                         std::to_string(g.n_nodes) + " nodes");
    const std::int64_t d = H.cols();
    ad::Tensor out(g.n_nodes, d);
    const auto& hv = H.values();
    auto& ov = out.values();
    for (std::int64_t v = 0; v < g.n_nodes; ++v) {
        const auto& nb = g.neighborhoods[static_cast<std::size_t>(v)];
        const auto deg = static_cast<double>(nb.size() - 1);  // neighborhoods include v
        if (deg == 0.0) continue;
        for (std::int32_t u : nb) {
            if (u == v) continue;
            for (std::int64_t j = 0; j < d; ++j)
                ov[static_cast<std::size_t>(v * d + j)] +=
                    hv[static_cast<std::size_t>(u * d + j)];
        }
        for (std::int64_t j = 0; j < d; ++j) ov[static_cast<std::size_t>(v * d + j)] /= deg;
    }
    tape.record("neighbor_mean", [H = H, out, &g, d]() mutable {
        const auto& gout = out.grad();
        auto& gh = H.grad();
        for (std::int64_t v = 0; v < g.n_nodes; ++v) {
            const auto& nb = g.neighborhoods[static_cast<std::size_t>(v)];
            const auto deg = static_cast<double>(nb.size() - 1);
            if (deg == 0.0) continue;
            for (std::int32_t u : nb) {
                if (u == v) continue;
                for (std::int64_t j = 0; j < d; ++j)
                    gh[static_cast<std::size_t>(u * d + j)] +=
                        gout[static_cast<std::size_t>(v * d + j)] / deg;
            }
        }
    });
    return out;
}

SageParams make_sage(std::int64_t d, ad::Rng& rng) {
    SageParams p;
    p.W = ad::Tensor::glorot(2 * d, d, rng);
    p.bias = ad::Tensor(1, d);
    p.bias.set_requires_grad();
    return p;
}

ad::Tensor sage_forward(ad::Tape& tape, const SageParams& p, const data::Graph& g,
                        const ad::Tensor& H) {
    if (2 * H.cols() != p.W.rows())
        throw ShapeError("sage_forward: input width " + std::to_string(H.cols()) +
                         " does not match W " + p.W.shape_str());
    ad::Tensor mixed = tape.concat({H, neighbor_mean(tape, g, H)}, 1);
    return tape.relu(tape.add(tape.matmul(mixed, p.W), p.bias));
}

}  // namespace connsearch::gnn
