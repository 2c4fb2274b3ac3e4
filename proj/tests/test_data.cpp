// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "connsearch/data/graph.hpp"
#include "connsearch/data/io.hpp"
#include "connsearch/errors.hpp"
#include "doctest.h"

using namespace connsearch;
using namespace connsearch::data;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("connsearch_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_SUITE("data") {

TEST_CASE("load_dataset: triangle, duplicate edges, comments") {
    const fs::path dir = fresh_dir("triangle");
    write_file(dir / "edges.tsv", "# a comment\n0\t1\n1\t2\n0\t2\n1\t0\n\n");
    write_file(dir / "features.csv", "1.0,0.0\n0.0,1.0\n0.5,0.5\n");
    write_file(dir / "labels.csv", "0\n1\n1\n");

    auto [g, split] = load_dataset(dir);
    CHECK(g.n_nodes == 3);
    CHECK(g.n_classes == 2);
    CHECK_FALSE(split.has_value());
    CHECK(g.edges.size() == 3);  // the duplicate 1->0 collapsed into 0->1
    CHECK(g.neighborhoods[0] == std::vector<std::int32_t>{0, 1, 2});
    CHECK(g.neighborhoods[1] == std::vector<std::int32_t>{0, 1, 2});
    CHECK(g.features.at(2, 0) == 0.5);
}

TEST_CASE("load_dataset: error taxonomy") {
    const fs::path dir = fresh_dir("errors");
    write_file(dir / "features.csv", "1,2\n3,4\n");
    write_file(dir / "labels.csv", "0\n1\n");

    // edges.tsv absent
    try {
        load_dataset(dir);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("edges.tsv") != std::string::npos);
    }

    write_file(dir / "edges.tsv", "0\t1\n");
    CHECK_NOTHROW(load_dataset(dir));

    write_file(dir / "features.csv", "1,2\n3\n");
    try {
        load_dataset(dir);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    write_file(dir / "features.csv", "1,2\n3,4\n");
    write_file(dir / "labels.csv", "0\n-1\n");
    CHECK_THROWS_AS(load_dataset(dir), FormatError);

    write_file(dir / "labels.csv", "0\n1\n");
    write_file(dir / "edges.tsv", "0\t5\n");
    CHECK_THROWS_AS(load_dataset(dir), FormatError);

    write_file(dir / "edges.tsv", "0\t1\n");
    write_file(dir / "splits.json", "{\"train\": [0], \"val\": [1]}");
    CHECK_THROWS_AS(load_dataset(dir), FormatError);
    write_file(dir / "splits.json", "{\"train\": [0], \"val\": [1], \"test\": [9]}");
    CHECK_THROWS_AS(load_dataset(dir), FormatError);
}

TEST_CASE("load_dataset: table-scale citation-style export") {
    // 2708 nodes, 5278 edges, 1433-wide features, 7 classes
    const fs::path dir = fresh_dir("citation");
    ad::Rng rng(77);
    {
        std::ofstream f(dir / "features.csv");
        std::ofstream l(dir / "labels.csv");
        for (int i = 0; i < 2708; ++i) {
            for (int j = 0; j < 1433; ++j) {
                if (j) f << ',';
                f << (rng.uniform() < 0.01 ? 1 : 0);
            }
            f << '\n';
            l << rng.uniform_int(7) << '\n';
        }
    }
    {
        std::ofstream e(dir / "edges.tsv");
        std::set<std::pair<int, int>> seen;
        while (seen.size() < 5278) {
            int u = static_cast<int>(rng.uniform_int(2708));
            int v = static_cast<int>(rng.uniform_int(2708));
            if (u == v) continue;
            if (seen.insert({std::min(u, v), std::max(u, v)}).second) e << u << '\t' << v << '\n';
        }
    }
    auto [g, split] = load_dataset(dir);
    CHECK(g.n_nodes == 2708);
    CHECK(g.features.cols() == 1433);
    CHECK(g.n_classes == 7);
    CHECK(g.edges.size() == 5278);
    fs::remove_all(dir);
}

TEST_CASE("split_nodes: ratios, determinism, stratification") {
    Graph g;
    g.n_nodes = 100;
    g.n_classes = 2;
    g.labels.resize(100);
    for (int v = 50; v < 100; ++v) g.labels[static_cast<std::size_t>(v)] = 1;
    g.features = ad::Tensor(100, 2);
    canonicalize(g);

    DataSplit s = split_nodes(g, 0.6, 0.2, 0.2, 7);
    CHECK(s.train.size() == 60);
    CHECK(s.val.size() == 20);
    CHECK(s.test.size() == 20);

    DataSplit again = split_nodes(g, 0.6, 0.2, 0.2, 7);
    CHECK(s.train == again.train);
    CHECK(s.val == again.val);
    CHECK(s.test == again.test);
    DataSplit other = split_nodes(g, 0.6, 0.2, 0.2, 8);
    CHECK(s.train != other.train);

    CHECK_THROWS_AS(split_nodes(g, 0.5, 0.5, 0.1, 7), ArgumentError);

    // uneven classes: disjoint, full cover, per-class counts within 1
    Graph h;
    h.n_nodes = 50;
    h.n_classes = 4;
    h.labels.resize(50);
    const int sizes[4] = {3, 7, 11, 29};
    int v = 0;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < sizes[c]; ++i) h.labels[static_cast<std::size_t>(v++)] = c;
    h.features = ad::Tensor(50, 2);
    canonicalize(h);
    DataSplit hs = split_nodes(h, 0.6, 0.2, 0.2, 3);
    std::set<int> all;
    all.insert(hs.train.begin(), hs.train.end());
    all.insert(hs.val.begin(), hs.val.end());
    all.insert(hs.test.begin(), hs.test.end());
    CHECK(all.size() == 50);
    CHECK(hs.train.size() + hs.val.size() + hs.test.size() == 50);
    for (int c = 0; c < 4; ++c) {
        auto count = [&](const std::vector<int>& mask) {
            int k = 0;
            for (int node : mask)
                if (h.labels[static_cast<std::size_t>(node)] == c) ++k;
            return k;
        };
        CHECK(std::abs(count(hs.train) - 0.6 * sizes[c]) <= 1.0);
        CHECK(std::abs(count(hs.val) - 0.2 * sizes[c]) <= 1.0);
        CHECK(std::abs(count(hs.test) - 0.2 * sizes[c]) <= 1.0);
        CHECK(count(hs.val) >= 1);
        CHECK(count(hs.test) >= 1);
    }

    // a class with fewer than 3 labeled nodes cannot be stratified
    Graph tiny;
    tiny.n_nodes = 5;
    tiny.n_classes = 2;
    tiny.labels = {0, 0, 0, 1, 1};
    tiny.features = ad::Tensor(5, 2);
    canonicalize(tiny);
    CHECK_THROWS_AS(split_nodes(tiny, 0.6, 0.2, 0.2, 1), ArgumentError);
}

TEST_CASE("generate_sbm: blocks, prototypes, determinism, guards") {
    Graph g = generate_sbm(2, 3, 1.0, 0.0, 2, 0.0, 5);
    CHECK(g.n_nodes == 6);
    CHECK(g.edges.size() == 6);  // two disjoint triangles
    CHECK(g.neighborhoods[0] == std::vector<std::int32_t>{0, 1, 2});
    CHECK(g.neighborhoods[5] == std::vector<std::int32_t>{3, 4, 5});
    for (int v = 0; v < 6; ++v) {
        CHECK(g.labels[static_cast<std::size_t>(v)] == (v < 3 ? 0 : 1));
        CHECK(g.features.at(v, g.labels[static_cast<std::size_t>(v)]) == 1.0);
        CHECK(g.features.at(v, 1 - g.labels[static_cast<std::size_t>(v)]) == 0.0);
    }

    Graph a = generate_sbm(3, 10, 0.4, 0.05, 8, 0.1, 123);
    Graph b = generate_sbm(3, 10, 0.4, 0.05, 8, 0.1, 123);
    CHECK(a.edges == b.edges);
    CHECK(a.features.values() == b.features.values());
    Graph c = generate_sbm(3, 10, 0.4, 0.05, 8, 0.1, 124);
    CHECK(a.edges != c.edges);

    CHECK_THROWS_AS(generate_sbm(2, 3, 0.2, 0.5, 4, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(generate_sbm(2, 3, 1.0, 0.0, 1, 0.0, 1), ArgumentError);
    CHECK_THROWS_AS(generate_sbm(0, 3, 1.0, 0.0, 4, 0.0, 1), ArgumentError);
}

TEST_CASE("row_normalize_features: L1 rows, zero rows untouched") {
    Graph g;
    g.n_nodes = 3;
    g.n_classes = 1;
    g.labels = {0, 0, 0};
    g.features = ad::Tensor::from_rows({{2, 2}, {0, 0}, {-1, 3}});
    canonicalize(g);

    Graph n = row_normalize_features(g);
    CHECK(n.features.at(0, 0) == 0.5);
    CHECK(n.features.at(0, 1) == 0.5);
    CHECK(n.features.at(1, 0) == 0.0);
    CHECK(n.features.at(1, 1) == 0.0);
    CHECK(n.features.at(2, 0) == doctest::Approx(-0.25));
    CHECK(n.features.at(2, 1) == doctest::Approx(0.75));
    // original untouched
    CHECK(g.features.at(0, 0) == 2.0);

    for (std::int64_t i = 0; i < 3; ++i) {
        double total = 0.0;
        for (std::int64_t j = 0; j < 2; ++j) total += std::abs(n.features.at(i, j));
        CHECK((std::abs(total - 1.0) < 1e-12 || total == 0.0));
    }
}

TEST_CASE("save/load round-trip reproduces the graph bitwise") {
    Graph g = generate_sbm(3, 8, 0.5, 0.1, 6, 0.3, 42);
    DataSplit s = split_nodes(g, 0.6, 0.2, 0.2, 42);
    const fs::path dir = fresh_dir("roundtrip");
    save_dataset(g, dir, &s);

    auto [g2, s2] = load_dataset(dir);
    CHECK(g2.n_nodes == g.n_nodes);
    CHECK(g2.n_classes == g.n_classes);
    CHECK(g2.edges == g.edges);
    CHECK(g2.labels == g.labels);
    CHECK(g2.features.values() == g.features.values());  // bitwise via 17 digits
    CHECK(g2.neighborhoods == g.neighborhoods);
    REQUIRE(s2.has_value());
    CHECK(s2->train == s.train);
    CHECK(s2->val == s.val);
    CHECK(s2->test == s.test);
    fs::remove_all(dir);
}

}  // TEST_SUITE
