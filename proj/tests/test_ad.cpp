// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <set>
#include <vector>

#include "connsearch/ad/adam.hpp"
#include "connsearch/ad/tape.hpp"
#include "connsearch/errors.hpp"
#include "doctest.h"
#include "gradcheck.hpp"

using namespace connsearch;
using namespace connsearch::ad;
using testutil::max_rel_err_vs_fd;
using testutil::random_tensor;

namespace {
constexpr double kGradTol = 1e-4;
}

TEST_SUITE("ad") {

TEST_CASE("rng: substreams are reproducible and independent") {
    Rng a = Rng::substream(17, "gumbel");
    Rng b = Rng::substream(17, "gumbel");
    Rng c = Rng::substream(17, "init");
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() == b.next_u64());
    CHECK(Rng::substream_seed(17, "gumbel") != Rng::substream_seed(17, "init"));
    CHECK(Rng::substream_seed(17, "gumbel") != Rng::substream_seed(18, "gumbel"));
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double o = c.uniform_open();
        CHECK(o > 0.0);
        CHECK(o < 1.0);
    }
    Rng d(5);
    for (int i = 0; i < 1000; ++i) {
        auto x = d.uniform_int(7);
        CHECK(x < 7);
        CHECK(std::isfinite(d.normal()));
    }
    std::vector<int> perm{0, 1, 2, 3, 4, 5, 6, 7};
    Rng e(9);
    e.shuffle(perm);
    CHECK(std::set<int>(perm.begin(), perm.end()).size() == 8);
}

TEST_CASE("gradients match central finite differences on composite graphs") {
    // The oracle for every differentiable primitive: 10 random shape/seed
    // draws through graphs that collectively touch each op.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed + 100);
        const auto m = static_cast<std::int64_t>(2 + rng.uniform_int(3));
        const auto k = static_cast<std::int64_t>(2 + rng.uniform_int(3));
        const auto n = static_cast<std::int64_t>(2 + rng.uniform_int(3));

        Tensor A = random_tensor(m, k, rng);
        Tensor B = random_tensor(k, n, rng);
        Tensor bias = random_tensor(1, n, rng);
        auto dense = [&](Tape& t) {
            return t.sum(t.relu(t.add(t.matmul(A, B), bias)));
        };
        CHECK(max_rel_err_vs_fd(dense, {A, B, bias}) < kGradTol);

        Tensor X = random_tensor(m, n, rng);
        Tensor Y = random_tensor(m, n, rng);
        Tensor col = random_tensor(m, 1, rng);
        auto mixed = [&](Tape& t) {
            Tensor num = t.mul(t.sigmoid(X), t.tanh(Y));
            Tensor den = t.add(t.exp(col), Tensor::scalar(1.0));
            return t.sum(t.sub(t.div(num, den), t.elu(t.leaky_relu(X, 0.2))));
        };
        CHECK(max_rel_err_vs_fd(mixed, {X, Y, col}) < kGradTol);

        Tensor L = random_tensor(m, 4, rng, -2.0, 2.0);
        Tensor R = random_tensor(4, 2, rng);
        auto soft = [&](Tape& t) {
            Tensor p = t.softmax(L, 1);
            Tensor q = t.log_softmax(L, 0);
            return t.add(t.element(t.matmul(p, R), 0, 1), t.sum(t.mul(p, q)));
        };
        CHECK(max_rel_err_vs_fd(soft, {L, R}) < kGradTol);

        Tensor U = random_tensor(m, 2, rng);
        Tensor V = random_tensor(m, 3, rng);
        Tensor W = random_tensor(m, 5, rng);
        Tensor s = random_tensor(1, 1, rng, 0.5, 1.5);
        auto fused = [&](Tape& t) {
            Tensor cat = t.concat({U, V}, 1);
            Tensor mx = t.stack_reduce(Tape::Reduce::kMax, {cat, W});
            Tensor mn = t.stack_reduce(Tape::Reduce::kMean, {cat, W, t.scale(W, s)});
            return t.add(t.sum(t.slice_cols(mx, 1, 3)), t.sum(t.scale_const(mn, 0.7)));
        };
        CHECK(max_rel_err_vs_fd(fused, {U, V, W, s}) < kGradTol);

        Tensor logits = random_tensor(m + 2, 3, rng, -2.0, 2.0);
        std::vector<int> labels;
        std::vector<int> mask;
        for (std::int64_t i = 0; i < m + 2; ++i) labels.push_back(static_cast<int>(rng.uniform_int(3)));
        for (std::int64_t i = 0; i < m + 1; ++i) mask.push_back(static_cast<int>(i));
        auto ce = [&](Tape& t) { return t.cross_entropy(logits, labels, mask); };
        CHECK(max_rel_err_vs_fd(ce, {logits}) < kGradTol);

        Tensor D = random_tensor(m, n, rng);
        auto dropped = [&, seed](Tape& t) {
            Rng local(seed * 31 + 7);  // same mask on every rebuild
            return t.sum(t.dropout(t.mul(D, D), 0.4, local));
        };
        CHECK(max_rel_err_vs_fd(dropped, {D}) < kGradTol);

        Tensor stacked = random_tensor(3, m, rng);
        auto axis0 = [&](Tape& t) {
            return t.sum(t.mul(t.softmax(stacked, 0), t.log_softmax(stacked, 1)));
        };
        CHECK(max_rel_err_vs_fd(axis0, {stacked}) < kGradTol);
    }
}

TEST_CASE("matmul: fixed values and shape errors") {
    Tape t;
    Tensor eye = Tensor::from_rows({{1, 0}, {0, 1}});
    Tensor v = Tensor::from_rows({{3}, {4}});
    Tensor out = t.matmul(eye, v);
    CHECK(out.at(0, 0) == doctest::Approx(3.0));
    CHECK(out.at(1, 0) == doctest::Approx(4.0));

    Tensor a = Tensor::from_rows({{1, 2}});
    CHECK(t.matmul(a, v).item() == doctest::Approx(11.0));

    // d sum(A·B) / dA = 1·Bᵀ
    Tensor A = Tensor::from_rows({{1, 2}, {3, 4}}).set_requires_grad();
    Tensor B = Tensor::from_rows({{1}, {1}});
    Tensor loss = t.sum(t.matmul(A, B));
    t.backward(loss);
    for (double g : A.grad()) CHECK(g == doctest::Approx(1.0));

    CHECK_THROWS_AS(t.matmul(a, a), ShapeError);
    try {
        t.matmul(a, a);
    } catch (const ShapeError& e) {
        CHECK(std::string(e.what()).find("1x2") != std::string::npos);
    }
}

TEST_CASE("matmul: bitwise stable across buffer placements") {
    Rng rng(4);
    Tensor a = random_tensor(6, 5, rng, -2.0, 2.0);
    Tensor b = random_tensor(5, 4, rng, -2.0, 2.0);
    Tape t(Tape::Mode::kNoGrad);
    Tensor first = t.matmul(a, b);
    std::vector<std::vector<double>> junk;  // nudges later heap offsets around
    for (int i = 0; i < 7; ++i) {
        junk.emplace_back(static_cast<std::size_t>(i * 3 + 1), 0.5);
        CHECK(t.matmul(a, b).values() == first.values());
    }
}

TEST_CASE("elementwise: spec values, broadcast rule, domain errors") {
    Tape t;
    Tensor out = t.add(Tensor::row({1, 2}), Tensor::row({3, 4}));
    CHECK(out.at(0, 0) == doctest::Approx(4.0));
    CHECK(out.at(0, 1) == doctest::Approx(6.0));

    Tensor r = t.relu(Tensor::row({-1, 0, 2}));
    CHECK(r.at(0, 0) == 0.0);
    CHECK(r.at(0, 1) == 0.0);
    CHECK(r.at(0, 2) == 2.0);

    Tensor x = Tensor::scalar(0.0).set_requires_grad();
    Tensor s = t.sigmoid(x);
    t.backward(s);
    CHECK(s.item() == doctest::Approx(0.5));
    CHECK(x.grad()[0] == doctest::Approx(0.25));

    // row and column broadcast against a full matrix, nothing else
    Tape t2;
    Tensor M(3, 4, 2.0);
    CHECK(t2.add(M, Tensor::row({1, 1, 1, 1})).at(2, 3) == doctest::Approx(3.0));
    CHECK(t2.mul(Tensor::column({1, 2, 3}), M).at(2, 0) == doctest::Approx(6.0));
    CHECK_THROWS_AS(t2.add(M, Tensor(2, 4)), ShapeError);
    CHECK_THROWS_AS(t2.add(Tensor::row({1, 2}), Tensor::column({1, 2})), ShapeError);

    CHECK_THROWS_AS(t2.div(M, Tensor(3, 4, 0.0)), DomainError);
    CHECK_THROWS_AS(t2.log(Tensor::row({-1.0})), DomainError);
}

TEST_CASE("softmax: fixed points, normalization, shift invariance") {
    Tape t;
    Tensor u = t.softmax(Tensor::row({0, 0}), 1);
    CHECK(u.at(0, 0) == doctest::Approx(0.5));

    Tensor w = t.softmax(Tensor::row({std::log(1.0), std::log(3.0)}), 1);
    CHECK(w.at(0, 0) == doctest::Approx(0.25));
    CHECK(w.at(0, 1) == doctest::Approx(0.75));

    Tensor big = t.softmax(Tensor::row({1000, 1000}), 1);
    CHECK(std::isfinite(big.at(0, 0)));
    CHECK(big.at(0, 0) == doctest::Approx(0.5));

    CHECK_THROWS_AS(t.softmax(Tensor::row({1, 2}), 2), ArgumentError);

    Rng rng(3);
    Tensor X = random_tensor(4, 5, rng, -3.0, 3.0);
    for (int axis : {0, 1}) {
        Tensor p = t.softmax(X, axis);
        const std::int64_t groups = axis == 1 ? p.rows() : p.cols();
        for (std::int64_t g = 0; g < groups; ++g) {
            double total = 0.0;
            const std::int64_t width = axis == 1 ? p.cols() : p.rows();
            for (std::int64_t k = 0; k < width; ++k)
                total += axis == 1 ? p.at(g, k) : p.at(k, g);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    // invariant under adding a constant to the logits
    Tensor shifted = X.clone();
    for (auto& v : shifted.values()) v += 37.5;
    Tensor p0 = t.softmax(X, 1);
    Tensor p1 = t.softmax(shifted, 1);
    for (std::int64_t i = 0; i < p0.size(); ++i)
        CHECK(p0.values()[static_cast<std::size_t>(i)] ==
              doctest::Approx(p1.values()[static_cast<std::size_t>(i)]).epsilon(1e-6));
}

TEST_CASE("concat and slice: exact round-trip") {
    Tape t;
    Tensor joined = t.concat({Tensor::from_rows({{1, 2}}), Tensor::from_rows({{3, 4}})}, 1);
    CHECK(joined.cols() == 4);
    CHECK(joined.at(0, 2) == 3.0);

    Tensor solo = Tensor::from_rows({{5, 6}});
    Tensor same = t.concat({solo}, 1);
    CHECK(same.at(0, 0) == 5.0);
    CHECK(same.at(0, 1) == 6.0);

    CHECK_THROWS_AS(t.concat({}, 1), ArgumentError);
    CHECK_THROWS_AS(t.concat({Tensor(2, 2), Tensor(3, 2)}, 1), ShapeError);
    CHECK_THROWS_AS(t.slice_cols(solo, 1, 5), ArgumentError);

    Rng rng(11);
    Tensor a = random_tensor(3, 2, rng);
    Tensor b = random_tensor(3, 4, rng);
    Tensor cat = t.concat({a, b}, 1);
    Tensor a2 = t.slice_cols(cat, 0, 2);
    Tensor b2 = t.slice_cols(cat, 2, 4);
    CHECK(a2.values() == a.values());  // bitwise
    CHECK(b2.values() == b.values());

    // backward of sum(concat(a,b)) is all-ones in each original shape
    Tape t3;
    Tensor loss = t3.sum(t3.concat({a, b}, 1));
    t3.backward(loss);
    for (double g : a.grad()) CHECK(g == 1.0);
    for (double g : b.grad()) CHECK(g == 1.0);
}

TEST_CASE("stack_reduce: fixed values and earliest-wins max ties") {
    Tape t;
    Tensor s = t.stack_reduce(Tape::Reduce::kSum,
                              {Tensor::from_rows({{1, 2}}), Tensor::from_rows({{3, 4}})});
    CHECK(s.at(0, 0) == 4.0);
    CHECK(s.at(0, 1) == 6.0);

    Tensor one = Tensor::from_rows({{7, 8}});
    Tensor m = t.stack_reduce(Tape::Reduce::kMean, {one});
    CHECK(m.values() == one.values());

    Tensor mx = t.stack_reduce(Tape::Reduce::kMax,
                               {Tensor::from_rows({{1, 5}}), Tensor::from_rows({{3, 2}})});
    CHECK(mx.at(0, 0) == 3.0);
    CHECK(mx.at(0, 1) == 5.0);

    CHECK_THROWS_AS(t.stack_reduce(Tape::Reduce::kSum, {}), ArgumentError);

    Tape t2;
    Tensor a = Tensor::row({2.0, 2.0}).set_requires_grad();
    Tensor b = Tensor::row({2.0, 9.0}).set_requires_grad();
    Tensor loss = t2.sum(t2.stack_reduce(Tape::Reduce::kMax, {a, b}));
    t2.backward(loss);
    CHECK(a.grad()[0] == 1.0);  // tie routed to the earliest input
    CHECK(b.grad()[0] == 0.0);
    CHECK(b.grad()[1] == 1.0);
}

TEST_CASE("cross entropy: uniform, margin limit, single-row mask") {
    Tape t;
    Tensor uniform(2, 4, 0.0);
    CHECK(t.cross_entropy(uniform, {0, 3}, {0, 1}).item() == doctest::Approx(std::log(4.0)));

    Tensor confident(1, 4, 0.0);
    confident.at(0, 2) = 60.0;
    CHECK(t.cross_entropy(confident, {2}, {0}).item() < 1e-12);

    Tensor two = Tensor::from_rows({{2.0, 0.0}, {0.0, 5.0}});
    const double row1 = t.cross_entropy(two, {0, 1}, {1}).item();
    const double expected = -std::log(std::exp(5.0) / (std::exp(0.0) + std::exp(5.0)));
    CHECK(row1 == doctest::Approx(expected));

    CHECK_THROWS_AS(t.cross_entropy(two, {0, 1}, {}), ArgumentError);
    CHECK_THROWS_AS(t.cross_entropy(two, {0, 7}, {0, 1}), ArgumentError);
    CHECK_THROWS_AS(t.cross_entropy(two, {0, 1}, {2}), ArgumentError);
}

TEST_CASE("backward: bookkeeping and error states") {
    Tape t;
    Tensor w = Tensor::row({1, 2}).set_requires_grad();
    Tensor bystander = Tensor::row({5, 5}).set_requires_grad();
    Tensor loss = t.sum(t.mul(w, w));
    t.backward(loss);
    CHECK(w.grad()[0] == doctest::Approx(2.0));
    CHECK(w.grad()[1] == doctest::Approx(4.0));
    CHECK_FALSE(bystander.has_grad());

    // frozen after backward
    CHECK_THROWS_AS(t.backward(loss), StateError);
    t.reset();
    CHECK(t.recording());
    CHECK(t.num_records() == 0);

    Tensor vec = t.mul(w, w);
    CHECK_THROWS_AS(t.backward(vec), ArgumentError);

    Tape quiet(Tape::Mode::kNoGrad);
    Tensor y = quiet.sum(quiet.mul(w, w));
    CHECK(quiet.num_records() == 0);
    CHECK_THROWS_AS(quiet.backward(y), StateError);
}

TEST_CASE("backward: bitwise deterministic across identical tapes") {
    auto run = [](std::vector<double>& gw) {
        Rng rng(42);
        Tensor W = random_tensor(4, 3, rng);
        Tensor X = random_tensor(5, 4, rng);
        Tape t;
        Tensor loss = t.sum(t.softmax(t.tanh(t.matmul(X, W)), 1));
        t.backward(loss);
        gw = W.grad();
    };
    std::vector<double> g1, g2;
    run(g1);
    run(g2);
    CHECK(g1 == g2);
}

TEST_CASE("dropout: passthrough at rate 0 and reproducible masks") {
    Tape t;
    Tensor x = Tensor::row({1, 2, 3});
    Rng rng(1);
    Tensor same = t.dropout(x, 0.0, rng);
    CHECK(same.same_storage(x));
    CHECK(t.num_records() == 0);

    Rng r1(8), r2(8);
    Tensor big(1, 1000, 1.0);
    Tensor d1 = t.dropout(big, 0.3, r1);
    Tensor d2 = t.dropout(big, 0.3, r2);
    CHECK(d1.values() == d2.values());
    std::int64_t kept = 0;
    for (double v : d1.values()) {
        if (v != 0.0) {
            CHECK(v == doctest::Approx(1.0 / 0.7));
            ++kept;
        }
    }
    CHECK(kept > 600);
    CHECK(kept < 800);
    CHECK_THROWS_AS(t.dropout(big, 1.0, r1), ArgumentError);
}

TEST_CASE("adam: first-step property, zero grad, missing grad") {
    Tensor w = Tensor::row({0.5}).set_requires_grad();
    w.grad()[0] = 3.0;
    AdamState st;
    std::vector<Tensor> params{w};
    adam_step(params, 0.01, 0.9, 0.999, 1e-8, st);
    // bias-corrected first step moves by ~lr against the gradient sign
    CHECK(w.values()[0] == doctest::Approx(0.5 - 0.01).epsilon(1e-5));
    CHECK(w.grad()[0] == 0.0);

    Tensor frozen = Tensor::row({2.0}).set_requires_grad();
    (void)frozen.grad();  // populated but zero
    std::vector<Tensor> params2{frozen};
    AdamState st2;
    adam_step(params2, 0.1, 0.9, 0.999, 1e-8, st2);
    CHECK(frozen.values()[0] == 2.0);

    Tensor missing = Tensor::row({1.0}).set_requires_grad();
    std::vector<Tensor> params3{missing};
    CHECK_THROWS_AS(adam_step(params3, 0.1, 0.9, 0.999, 1e-8, st2), StateError);
}

TEST_CASE("adam: matches the scalar recurrence on a quadratic bowl") {
    // oracle: the same update rule run on plain doubles, no tape involved
    double w_ref = 1.0, m_ref = 0.0, v_ref = 0.0;
    const double lr = 0.1, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int step = 1; step <= 200; ++step) {
        const double g = 2.0 * w_ref;
        m_ref = b1 * m_ref + (1.0 - b1) * g;
        v_ref = b2 * v_ref + (1.0 - b2) * g * g;
        const double mhat = m_ref / (1.0 - std::pow(b1, step));
        const double vhat = v_ref / (1.0 - std::pow(b2, step));
        w_ref -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    CHECK(std::abs(w_ref) < 1e-2);

    Tensor w = Tensor::row({1.0}).set_requires_grad();
    AdamState st;
    std::vector<Tensor> params{w};
    for (int step = 0; step < 200; ++step) {
        Tape t;
        Tensor loss = t.sum(t.mul(w, w));
        t.backward(loss);
        adam_step(params, lr, 0.9, 0.999, 1e-8, st);
    }
    CHECK(std::abs(w.values()[0]) < 1e-2);
    CHECK(w.values()[0] == doctest::Approx(w_ref).epsilon(1e-10));
}

TEST_CASE("adam: weight decay feeds the gradient, not the raw step") {
    Tensor w = Tensor::row({2.0}).set_requires_grad();
    (void)w.grad();  // zero gradient; only the decay term drives the step
    AdamState st;
    std::vector<Tensor> params{w};
    adam_step(params, 0.05, 0.9, 0.999, 1e-8, st, 1e-2);
    // effective g = 0 + wd*w > 0, so w must shrink by ~lr after bias correction
    CHECK(w.values()[0] == doctest::Approx(2.0 - 0.05).epsilon(1e-4));
}

TEST_CASE("tensor: construction, item, clone, copy semantics") {
    CHECK_THROWS_AS(Tensor(0, 3), ShapeError);
    CHECK_THROWS_AS(Tensor::from_rows({{1, 2}, {3}}), ShapeError);
    CHECK_THROWS_AS(Tensor::row({1, 2}).item(), ShapeError);

    Tensor a = Tensor::from_rows({{1, 2}, {3, 4}});
    Tensor alias = a;
    alias.at(0, 0) = 9.0;
    CHECK(a.at(0, 0) == 9.0);
    CHECK(a.same_storage(alias));

    Tensor deep = a.clone();
    deep.at(0, 0) = 1.0;
    CHECK(a.at(0, 0) == 9.0);
    CHECK_FALSE(a.same_storage(deep));

    CHECK_THROWS_AS(a.copy_values_from(Tensor(3, 3)), ShapeError);

    Rng rng(2);
    Tensor g = Tensor::glorot(30, 20, rng);
    const double limit = std::sqrt(6.0 / (30 + 20));
    for (double v : g.values()) {
        CHECK(v >= -limit);
        CHECK(v <= limit);
    }
    CHECK(g.requires_grad());
}

}  // TEST_SUITE
