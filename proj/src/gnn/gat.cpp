// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/gnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "connsearch/errors.hpp"

namespace connsearch::gnn {

namespace {

// Attention-weighted neighborhood aggregation for one head. Scores, the
// per-destination softmax, and the weighted sum are fused into a single
// taped op; the closure below is its hand-derived backward.
ad::Tensor gat_attention(ad::Tape& tape, const data::Graph& g, const ad::Tensor& s_src,
                         const ad::Tensor& s_dst, const ad::Tensor& Z, double slope,
                         std::vector<double>& alpha_flat) {
    const std::int64_t d = Z.cols();
    std::size_t total = 0;
    for (const auto& nb : g.neighborhoods) total += nb.size();
    alpha_flat.assign(total, 0.0);

    ad::Tensor out(g.n_nodes, d);
    const auto& ss = s_src.values();
    const auto& sd = s_dst.values();
    const auto& zv = Z.values();
    auto& ov = out.values();
    std::size_t base = 0;
    for (std::int64_t v = 0; v < g.n_nodes; ++v) {
        const auto& nb = g.neighborhoods[static_cast<std::size_t>(v)];
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nb.size(); ++i) {
            const double t = ss[static_cast<std::size_t>(nb[i])] + sd[static_cast<std::size_t>(v)];
            const double e = t > 0.0 ? t : slope * t;
            alpha_flat[base + i] = e;
            mx = std::max(mx, e);
        }
        double denom = 0.0;
        for (std::size_t i = 0; i < nb.size(); ++i) {
            alpha_flat[base + i] = std::exp(alpha_flat[base + i] - mx);
            denom += alpha_flat[base + i];
        }
        for (std::size_t i = 0; i < nb.size(); ++i) {
            alpha_flat[base + i] /= denom;
            const auto u = static_cast<std::size_t>(nb[i]);
            for (std::int64_t j = 0; j < d; ++j)
                ov[static_cast<std::size_t>(v * d + j)] +=
                    alpha_flat[base + i] * zv[u * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
        }
        base += nb.size();
    }

    tape.record("gat_attention",
                [s_src = s_src, s_dst = s_dst, Z = Z, out, &g, d, slope, alpha = alpha_flat]() mutable {
        const auto& ss = s_src.values();
        const auto& sd = s_dst.values();
        const auto& zv = Z.values();
        const auto& gout = out.grad();
        auto& gss = s_src.grad();
        auto& gsd = s_dst.grad();
        auto& gz = Z.grad();
        std::size_t base = 0;
        for (std::int64_t v = 0; v < g.n_nodes; ++v) {
            const auto& nb = g.neighborhoods[static_cast<std::size_t>(v)];
            const auto vd = static_cast<std::size_t>(v * d);
            // dot_u = g_v . z_u, and the softmax-backward mixing term
            double mix = 0.0;
            std::vector<double> dots(nb.size());
            for (std::size_t i = 0; i < nb.size(); ++i) {
                const auto u = static_cast<std::size_t>(nb[i]);
                double dot = 0.0;
                for (std::int64_t j = 0; j < d; ++j)
                    dot += gout[vd + static_cast<std::size_t>(j)] *
                           zv[u * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
                dots[i] = dot;
                mix += alpha[base + i] * dot;
            }
            for (std::size_t i = 0; i < nb.size(); ++i) {
                const auto u = static_cast<std::size_t>(nb[i]);
                const double a = alpha[base + i];
                const double ge = a * (dots[i] - mix);
                const double t = ss[u] + sd[static_cast<std::size_t>(v)];
                const double gt = ge * (t > 0.0 ? 1.0 : slope);
                gss[u] += gt;
                gsd[static_cast<std::size_t>(v)] += gt;
                for (std::int64_t j = 0; j < d; ++j)
                    gz[u * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] +=
                        a * gout[vd + static_cast<std::size_t>(j)];
            }
            base += nb.size();
        }
    });
    return out;
}

}  // namespace

GatParams make_gat(std::int64_t d, int heads, double leaky_slope, ad::Rng& rng) {
    if (heads < 1) throw ArgumentError("make_gat: heads must be at least 1");
    GatParams p;
    p.leaky_slope = leaky_slope;
    for (int h = 0; h < heads; ++h) {
        p.W.push_back(ad::Tensor::glorot(d, d, rng));
        p.a_src.push_back(ad::Tensor::glorot(d, 1, rng));
        p.a_dst.push_back(ad::Tensor::glorot(d, 1, rng));
    }
    return p;
}

ad::Tensor gat_forward(ad::Tape& tape, const GatParams& p, const data::Graph& g,
                       const ad::Tensor& H, std::vector<std::vector<double>>* attn_out) {
    if (H.rows() != g.n_nodes)
        throw ShapeError("gat_forward: " + H.shape_str() + " rows vs " +
                         std::to_string(g.n_nodes) + " nodes");
    if (H.cols() != p.W[0].rows())
        throw ShapeError("gat_forward: input width " + std::to_string(H.cols()) +
                         " does not match W " + p.W[0].shape_str());
    const auto heads = p.W.size();
    std::vector<ad::Tensor> head_outs;
    std::vector<double> alpha_sum;
    for (std::size_t h = 0; h < heads; ++h) {
        ad::Tensor Z = tape.matmul(H, p.W[h]);
        ad::Tensor ss = tape.matmul(Z, p.a_src[h]);
        ad::Tensor sd = tape.matmul(Z, p.a_dst[h]);
        std::vector<double> alpha;
        ad::Tensor att = gat_attention(tape, g, ss, sd, Z, p.leaky_slope, alpha);
        head_outs.push_back(tape.elu(att));
        if (attn_out) {
            if (alpha_sum.empty()) alpha_sum.assign(alpha.size(), 0.0);
            for (std::size_t k = 0; k < alpha.size(); ++k) alpha_sum[k] += alpha[k];
        }
    }
    if (attn_out) {
        attn_out->assign(static_cast<std::size_t>(g.n_nodes), {});
        std::size_t base = 0;
        for (std::int64_t v = 0; v < g.n_nodes; ++v) {
            const auto& nb = g.neighborhoods[static_cast<std::size_t>(v)];
            auto& row = (*attn_out)[static_cast<std::size_t>(v)];
            for (std::size_t i = 0; i < nb.size(); ++i)
                row.push_back(alpha_sum[base + i] / static_cast<double>(heads));
            base += nb.size();
        }
    }
    return head_outs.size() == 1 ? head_outs[0]
                                 : tape.stack_reduce(ad::Tape::Reduce::kMean, head_outs);
}

}  // namespace connsearch::gnn
