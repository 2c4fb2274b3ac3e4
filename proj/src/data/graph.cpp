// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/data/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "connsearch/ad/rng.hpp"
#include "connsearch/errors.hpp"

namespace connsearch::data {

void canonicalize(Graph& g) {
    std::vector<std::pair<std::int32_t, std::int32_t>> canon;
    canon.reserve(g.edges.size());
    for (auto [u, v] : g.edges) {
        if (u == v) continue;  // self-loops live in neighborhoods, not edges
        canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
    g.edges = std::move(canon);

    g.neighborhoods.assign(static_cast<std::size_t>(g.n_nodes), {});
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        g.neighborhoods[static_cast<std::size_t>(v)].push_back(static_cast<std::int32_t>(v));
    for (auto [u, v] : g.edges) {
        g.neighborhoods[static_cast<std::size_t>(u)].push_back(v);
        g.neighborhoods[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : g.neighborhoods) std::sort(nb.begin(), nb.end());
}

DataSplit split_nodes(const Graph& g, double train_ratio, double val_ratio, double test_ratio,
                      std::uint64_t seed) {
    const double ratios[3] = {train_ratio, val_ratio, test_ratio};
    double total = 0.0;
    for (double r : ratios) {
        if (r <= 0.0) throw ArgumentError("split_nodes: ratios must be positive");
        total += r;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ArgumentError("split_nodes: ratios sum to " + std::to_string(total) + ", expected 1");

    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(g.n_classes));
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        by_class[static_cast<std::size_t>(g.labels[static_cast<std::size_t>(v)])].push_back(
            static_cast<int>(v));

    ad::Rng rng = ad::Rng::substream(seed, "split");
    DataSplit split;
    for (int c = 0; c < g.n_classes; ++c) {
        auto& nodes = by_class[static_cast<std::size_t>(c)];
        const auto nc = nodes.size();
        if (nc < 3)
            throw ArgumentError("split_nodes: class " + std::to_string(c) + " has only " +
                                std::to_string(nc) + " labeled nodes; cannot stratify");
        rng.shuffle(nodes);

        // largest-remainder apportionment keeps every count within one node
        // of the exact ratio
        std::size_t counts[3];
        double fracs[3];
        std::size_t assigned = 0;
        for (int k = 0; k < 3; ++k) {
            const double exact = static_cast<double>(nc) * ratios[k];
            counts[k] = static_cast<std::size_t>(exact);
            fracs[k] = exact - static_cast<double>(counts[k]);
            assigned += counts[k];
        }
        for (std::size_t left = nc - assigned; left > 0; --left) {
            int best = 0;
            for (int k = 1; k < 3; ++k)
                if (fracs[k] > fracs[best]) best = k;
            counts[best] += 1;
            fracs[best] = -1.0;
        }
        for (int k = 0; k < 3; ++k) {
            while (counts[k] == 0) {  // keep each split represented in each class
                int donor = 0;
                for (int j = 1; j < 3; ++j)
                    if (counts[j] > counts[donor]) donor = j;
                counts[donor] -= 1;
                counts[k] += 1;
            }
        }

        std::size_t pos = 0;
        for (std::size_t i = 0; i < counts[0]; ++i) split.train.push_back(nodes[pos++]);
        for (std::size_t i = 0; i < counts[1]; ++i) split.val.push_back(nodes[pos++]);
        for (std::size_t i = 0; i < counts[2]; ++i) split.test.push_back(nodes[pos++]);
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

Graph generate_sbm(int communities, int nodes_per_community, double p_in, double p_out,
                   int feature_dim, double feature_noise, std::uint64_t seed) {
    if (communities < 1 || nodes_per_community < 1)
        throw ArgumentError("generate_sbm: need at least one community and one node per community");
    if (!(p_out >= 0.0 && p_out < p_in && p_in <= 1.0))
        throw ArgumentError("generate_sbm: probabilities must satisfy 0 <= p_out < p_in <= 1");
    if (feature_dim < communities)
        throw ArgumentError("generate_sbm: feature_dim " + std::to_string(feature_dim) +
                            " below community count " + std::to_string(communities));

    Graph g;
    g.n_nodes = static_cast<std::int64_t>(communities) * nodes_per_community;
    g.n_classes = communities;
    g.labels.resize(static_cast<std::size_t>(g.n_nodes));
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        g.labels[static_cast<std::size_t>(v)] = static_cast<int>(v / nodes_per_community);

    ad::Rng rng = ad::Rng::substream(seed, "data");
    for (std::int64_t u = 0; u < g.n_nodes; ++u) {
        for (std::int64_t v = u + 1; v < g.n_nodes; ++v) {
            const bool same = g.labels[static_cast<std::size_t>(u)] ==
                              g.labels[static_cast<std::size_t>(v)];
            if (rng.uniform() < (same ? p_in : p_out))
                g.edges.emplace_back(static_cast<std::int32_t>(u), static_cast<std::int32_t>(v));
        }
    }

    g.features = ad::Tensor(g.n_nodes, feature_dim);
    for (std::int64_t v = 0; v < g.n_nodes; ++v) {
        g.features.at(v, g.labels[static_cast<std::size_t>(v)]) = 1.0;
        if (feature_noise > 0.0)
            for (std::int64_t j = 0; j < feature_dim; ++j)
                g.features.at(v, j) += feature_noise * rng.normal();
    }

    canonicalize(g);
    return g;
}

Graph row_normalize_features(const Graph& g) {
    Graph out = g;
    out.features = g.features.clone();
    for (std::int64_t v = 0; v < out.features.rows(); ++v) {
        double norm = 0.0;
        for (std::int64_t j = 0; j < out.features.cols(); ++j) norm += std::abs(out.features.at(v, j));
        if (norm == 0.0) continue;
        for (std::int64_t j = 0; j < out.features.cols(); ++j) out.features.at(v, j) /= norm;
    }
    return out;
}

}  // namespace connsearch::data
