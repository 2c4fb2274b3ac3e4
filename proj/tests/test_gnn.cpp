// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "connsearch/data/graph.hpp"
#include "connsearch/errors.hpp"
#include "connsearch/gnn/layers.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace connsearch;
using namespace connsearch::ad;
using namespace connsearch::gnn;
using testutil::max_rel_err_vs_fd;
using testutil::random_tensor;

namespace {

constexpr double kGradTol = 1e-4;

data::Graph make_graph(std::int64_t n, std::vector<std::pair<std::int32_t, std::int32_t>> edges,
                       Tensor features) {
    data::Graph g;
    g.n_nodes = n;
    g.edges = std::move(edges);
    g.features = std::move(features);
    g.labels.assign(static_cast<std::size_t>(n), 0);
    g.n_classes = 1;
    data::canonicalize(g);
    return g;
}

// applies a node relabeling v -> perm[v] to a graph and feature matrix
data::Graph permute_graph(const data::Graph& g, const std::vector<std::int32_t>& perm) {
    data::Graph out;
    out.n_nodes = g.n_nodes;
    for (auto [u, v] : g.edges)
        out.edges.emplace_back(perm[static_cast<std::size_t>(u)],
                               perm[static_cast<std::size_t>(v)]);
    out.features = Tensor(g.features.rows(), g.features.cols());
    out.labels.assign(static_cast<std::size_t>(g.n_nodes), 0);
    out.n_classes = 1;
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        for (std::int64_t j = 0; j < g.features.cols(); ++j)
            out.features.at(perm[static_cast<std::size_t>(v)], j) = g.features.at(v, j);
    data::canonicalize(out);
    return out;
}

}  // namespace

TEST_SUITE("gnn") {

TEST_CASE("mlp2: identity passthrough, zero weights, gradients") {
    Tape t;
    MlpBlockParams p;
    p.W0 = Tensor::from_rows({{1, 0}, {0, 1}});
    p.W1 = Tensor::from_rows({{1, 0}, {0, 1}});
    p.activation = Activation::kRelu;
    Tensor H = Tensor::from_rows({{1, 2}, {0, 3}});
    Tensor out = mlp2_forward(t, p, H);
    CHECK(out.values() == H.values());

    MlpBlockParams zero = p;
    zero.W0 = Tensor(2, 2, 0.0);
    Tensor flat = mlp2_forward(t, zero, H);
    for (double v : flat.values()) CHECK(v == 0.0);

    Rng rng(1);
    MlpBlockParams q = make_mlp(3, 4, 2, Activation::kTanh, false, rng);
    Tensor X = random_tensor(5, 3, rng);
    auto f = [&](Tape& tape) { return tape.sum(mlp2_forward(tape, q, X)); };
    CHECK(max_rel_err_vs_fd(f, {X, q.W0, q.W1}) < kGradTol);

    MlpBlockParams head = make_mlp(3, 4, 2, Activation::kRelu, true, rng);
    auto f2 = [&](Tape& tape) { return tape.sum(tape.tanh(mlp2_forward(tape, head, X))); };
    CHECK(max_rel_err_vs_fd(f2, {X, head.W0, head.W1}) < kGradTol);

    CHECK_THROWS_AS(mlp2_forward(t, q, Tensor(5, 7)), ShapeError);
}

TEST_CASE("neighbor_mean: path graph hand values, isolated nodes, gradient") {
    // 0-1-2 path: non-self neighbor means are [2], [2], [2]
    data::Graph path = make_graph(3, {{0, 1}, {1, 2}}, Tensor::from_rows({{1}, {2}, {3}}));
    Tape t;
    Tensor m = neighbor_mean(t, path, path.features);
    CHECK(m.at(0, 0) == doctest::Approx(2.0));
    CHECK(m.at(1, 0) == doctest::Approx(2.0));
    CHECK(m.at(2, 0) == doctest::Approx(2.0));

    data::Graph lonely = make_graph(2, {}, Tensor::from_rows({{5, 5}, {7, 7}}));
    Tensor z = neighbor_mean(t, lonely, lonely.features);
    for (double v : z.values()) CHECK(v == 0.0);

    Rng rng(3);
    data::Graph g = data::generate_sbm(2, 5, 0.8, 0.2, 4, 0.5, 11);
    Tensor H = random_tensor(g.n_nodes, 4, rng);
    auto f = [&](Tape& tape) { return tape.sum(tape.tanh(neighbor_mean(tape, g, H))); };
    CHECK(max_rel_err_vs_fd(f, {H}) < kGradTol);
}

TEST_CASE("sage: isolated-node rule and finite differences") {
    Rng rng(7);
    SageParams p = make_sage(2, rng);
    data::Graph lonely = make_graph(1, {}, Tensor::from_rows({{0.5, -0.25}}));
    Tape t;
    Tensor out = sage_forward(t, p, lonely, lonely.features);
    for (std::int64_t j = 0; j < 2; ++j) {
        double acc = p.bias.at(0, j);
        acc += 0.5 * p.W.at(0, j) + -0.25 * p.W.at(1, j);  // neighbor half is zero
        CHECK(out.at(0, j) == doctest::Approx(std::max(acc, 0.0)));
    }

    data::Graph g = data::generate_sbm(2, 4, 0.9, 0.3, 3, 0.4, 2);
    SageParams q = make_sage(3, rng);
    Tensor H = random_tensor(g.n_nodes, 3, rng);
    auto f = [&](Tape& tape) { return tape.sum(sage_forward(tape, q, g, H)); };
    CHECK(max_rel_err_vs_fd(f, {H, q.W, q.bias}) < kGradTol);

    CHECK_THROWS_AS(sage_forward(t, q, g, Tensor(g.n_nodes, 5)), ShapeError);
}

TEST_CASE("sage: permutation equivariance is exact on integer features") {
    // integer-valued doubles sum exactly, so reordering the neighbor loop
    // cannot change the mean bitwise
    Rng rng(19);
    data::Graph g = data::generate_sbm(3, 4, 0.7, 0.2, 3, 0.0, 5);
    Tensor H(g.n_nodes, 3);
    for (auto& v : H.values()) v = static_cast<double>(rng.uniform_int(19)) - 9.0;
    SageParams p = make_sage(3, rng);
    for (auto& v : p.W.values()) v = static_cast<double>(rng.uniform_int(7)) - 3.0;

    std::vector<std::int32_t> perm(static_cast<std::size_t>(g.n_nodes));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::int32_t>(i);
    rng.shuffle(perm);
    data::Graph pg = permute_graph(g, perm);
    Tensor PH(g.n_nodes, 3);
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        for (std::int64_t j = 0; j < 3; ++j)
            PH.at(perm[static_cast<std::size_t>(v)], j) = H.at(v, j);

    Tape t(Tape::Mode::kNoGrad);
    Tensor a = sage_forward(t, p, g, H);
    Tensor b = sage_forward(t, p, pg, PH);
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        for (std::int64_t j = 0; j < 3; ++j)
            CHECK(a.at(v, j) == b.at(perm[static_cast<std::size_t>(v)], j));
}

TEST_CASE("gat: single node, uniform attention, row sums") {
    Rng rng(13);
    GatParams p = make_gat(2, 1, 0.2, rng);
    data::Graph lonely = make_graph(1, {}, Tensor::from_rows({{1.0, -2.0}}));
    Tape t;
    std::vector<std::vector<double>> attn;
    Tensor out = gat_forward(t, p, lonely, lonely.features, &attn);
    CHECK(attn[0].size() == 1);
    CHECK(attn[0][0] == doctest::Approx(1.0));
    for (std::int64_t j = 0; j < 2; ++j) {
        const double z = 1.0 * p.W[0].at(0, j) + -2.0 * p.W[0].at(1, j);
        const double e = z > 0.0 ? z : std::expm1(z);
        CHECK(out.at(0, j) == doctest::Approx(e));
    }

    // zero attention vectors make every neighborhood uniform
    data::Graph g = data::generate_sbm(2, 4, 0.9, 0.4, 3, 0.3, 21);
    GatParams q = make_gat(3, 1, 0.2, rng);
    for (auto& v : q.a_src[0].values()) v = 0.0;
    for (auto& v : q.a_dst[0].values()) v = 0.0;
    Tensor H = random_tensor(g.n_nodes, 3, rng);
    std::vector<std::vector<double>> uni;
    gat_forward(t, q, g, H, &uni);
    for (std::int64_t v = 0; v < g.n_nodes; ++v) {
        const auto width = uni[static_cast<std::size_t>(v)].size();
        for (double a : uni[static_cast<std::size_t>(v)])
            CHECK(a == doctest::Approx(1.0 / static_cast<double>(width)));
    }

    // on a generic parameterization, coefficients per destination sum to 1
    GatParams r = make_gat(3, 2, 0.2, rng);
    std::vector<std::vector<double>> coeffs;
    gat_forward(t, r, g, H, &coeffs);
    for (const auto& row : coeffs) {
        double total = 0.0;
        for (double a : row) total += a;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("gat: custom backward agrees with finite differences") {
    Rng rng(17);
    data::Graph g = data::generate_sbm(2, 4, 0.8, 0.3, 3, 0.4, 9);
    Tensor H = random_tensor(g.n_nodes, 3, rng);
    for (int heads : {1, 2}) {
        GatParams p = make_gat(3, heads, 0.2, rng);
        auto f = [&](Tape& tape) { return tape.sum(gat_forward(tape, p, g, H)); };
        std::vector<Tensor> inputs{H};
        for (auto& w : p.params()) inputs.push_back(w);
        CHECK(max_rel_err_vs_fd(f, inputs) < kGradTol);
    }
    Tape t;
    GatParams p = make_gat(3, 1, 0.2, rng);
    CHECK_THROWS_AS(gat_forward(t, p, g, Tensor(g.n_nodes, 4)), ShapeError);
}

TEST_CASE("gat: equivariance, exact on degree-1 matching, 1e-12 in general") {
    Rng rng(23);
    // perfect matching: every neighborhood has two members, and two-term
    // sums commute bitwise
    data::Graph match = make_graph(6, {{0, 3}, {1, 4}, {2, 5}}, Tensor(6, 2));
    Tensor H(6, 2);
    for (auto& v : H.values()) v = static_cast<double>(rng.uniform_int(9)) - 4.0;
    GatParams p = make_gat(2, 1, 0.25, rng);
    for (auto& w : p.params())
        for (auto& v : w.values()) v = static_cast<double>(rng.uniform_int(5)) - 2.0;

    std::vector<std::int32_t> perm{3, 5, 0, 2, 4, 1};
    data::Graph pm = permute_graph(match, perm);
    Tensor PH(6, 2);
    for (std::int64_t v = 0; v < 6; ++v)
        for (std::int64_t j = 0; j < 2; ++j) PH.at(perm[static_cast<std::size_t>(v)], j) = H.at(v, j);
    Tape t(Tape::Mode::kNoGrad);
    Tensor a = gat_forward(t, p, match, H);
    Tensor b = gat_forward(t, p, pm, PH);
    for (std::int64_t v = 0; v < 6; ++v)
        for (std::int64_t j = 0; j < 2; ++j)
            CHECK(a.at(v, j) == b.at(perm[static_cast<std::size_t>(v)], j));

    data::Graph g = data::generate_sbm(2, 5, 0.8, 0.3, 3, 0.4, 31);
    Tensor X = random_tensor(g.n_nodes, 3, rng);
    GatParams q = make_gat(3, 1, 0.2, rng);
    std::vector<std::int32_t> rperm(static_cast<std::size_t>(g.n_nodes));
    for (std::size_t i = 0; i < rperm.size(); ++i) rperm[i] = static_cast<std::int32_t>(i);
    rng.shuffle(rperm);
    data::Graph pg = permute_graph(g, rperm);
    Tensor PX(g.n_nodes, 3);
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        for (std::int64_t j = 0; j < 3; ++j)
            PX.at(rperm[static_cast<std::size_t>(v)], j) = X.at(v, j);
    Tensor ga = gat_forward(t, q, g, X);
    Tensor gb = gat_forward(t, q, pg, PX);
    for (std::int64_t v = 0; v < g.n_nodes; ++v)
        for (std::int64_t j = 0; j < 3; ++j)
            CHECK(ga.at(v, j) ==
                  doctest::Approx(gb.at(rperm[static_cast<std::size_t>(v)], j)).epsilon(1e-12));
}

}  // TEST_SUITE
