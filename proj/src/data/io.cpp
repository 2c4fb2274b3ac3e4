// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/data/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "connsearch/errors.hpp"

namespace connsearch::data {

namespace {

std::ifstream open_or_throw(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw IoError("missing file: " + p.string());
    return in;
}

double parse_double(const std::string& field, const std::filesystem::path& file, std::size_t line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw FormatError(file.filename().string() + " line " + std::to_string(line) +
                          ": bad number '" + field + "'");
    return v;
}

long parse_long(const std::string& field, const std::filesystem::path& file, std::size_t line) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
        throw FormatError(file.filename().string() + " line " + std::to_string(line) +
                          ": bad integer '" + field + "'");
    return v;
}

std::string strip(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<int> read_id_array(const nlohmann::json& j, const char* key, std::int64_t n,
                               const std::filesystem::path& file) {
    if (!j.contains(key) || !j[key].is_array())
        throw FormatError(file.filename().string() + ": missing array '" + std::string(key) + "'");
    std::vector<int> out;
    for (const auto& e : j[key]) {
        if (!e.is_number_integer())
            throw FormatError(file.filename().string() + ": non-integer id in '" +
                              std::string(key) + "'");
        const auto id = e.get<std::int64_t>();
        if (id < 0 || id >= n)
            throw FormatError(file.filename().string() + ": node id " + std::to_string(id) +
                              " in '" + std::string(key) + "' outside [0, " + std::to_string(n) +
                              ")");
        out.push_back(static_cast<int>(id));
    }
    return out;
}

}  // namespace

std::pair<Graph, std::optional<DataSplit>> load_dataset(const std::filesystem::path& dir) {
    Graph g;

    const auto features_path = dir / "features.csv";
    {
        std::ifstream in = open_or_throw(features_path);
        std::vector<std::vector<double>> rows;
        std::string line;
        std::size_t lineno = 0;
        std::int64_t width = -1;
        while (std::getline(in, line)) {
            ++lineno;
            if (strip(line).empty()) continue;
            std::vector<double> row;
            std::stringstream ss(line);
            std::string field;
            while (std::getline(ss, field, ','))
                row.push_back(parse_double(strip(field), features_path, lineno));
            if (width < 0) width = static_cast<std::int64_t>(row.size());
            if (static_cast<std::int64_t>(row.size()) != width)
                throw FormatError("features.csv line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(width) + " values, got " +
                                  std::to_string(row.size()));
            rows.push_back(std::move(row));
        }
        if (rows.empty()) throw FormatError("features.csv: no feature rows");
        g.n_nodes = static_cast<std::int64_t>(rows.size());
        g.features = ad::Tensor(g.n_nodes, width);
        for (std::int64_t i = 0; i < g.n_nodes; ++i)
            for (std::int64_t j = 0; j < width; ++j)
                g.features.at(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }

    const auto labels_path = dir / "labels.csv";
    {
        std::ifstream in = open_or_throw(labels_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = strip(line);
            if (s.empty()) continue;
            const long label = parse_long(s, labels_path, lineno);
            if (label < 0)
                throw FormatError("labels.csv line " + std::to_string(lineno) +
                                  ": label out of range");
            g.labels.push_back(static_cast<int>(label));
        }
        if (static_cast<std::int64_t>(g.labels.size()) != g.n_nodes)
            throw FormatError("labels.csv: " + std::to_string(g.labels.size()) + " labels for " +
                              std::to_string(g.n_nodes) + " nodes");
        g.n_classes = 1 + *std::max_element(g.labels.begin(), g.labels.end());
    }

    const auto edges_path = dir / "edges.tsv";
    {
        std::ifstream in = open_or_throw(edges_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = strip(line);
            if (s.empty() || s[0] == '#') continue;
            std::stringstream ss(s);
            std::string a, b;
            if (!(ss >> a >> b))
                throw FormatError("edges.tsv line " + std::to_string(lineno) +
                                  ": expected 'src<TAB>dst'");
            const long u = parse_long(a, edges_path, lineno);
            const long v = parse_long(b, edges_path, lineno);
            if (u < 0 || u >= g.n_nodes || v < 0 || v >= g.n_nodes)
                throw FormatError("edges.tsv line " + std::to_string(lineno) + ": endpoint outside [0, " +
                                  std::to_string(g.n_nodes) + ")");
            g.edges.emplace_back(static_cast<std::int32_t>(u), static_cast<std::int32_t>(v));
        }
    }

    canonicalize(g);

    std::optional<DataSplit> split;
    const auto splits_path = dir / "splits.json";
    if (std::filesystem::exists(splits_path)) {
        std::ifstream in = open_or_throw(splits_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("splits.json: " + std::string(e.what()));
        }
        DataSplit s;
        s.train = read_id_array(j, "train", g.n_nodes, splits_path);
        s.val = read_id_array(j, "val", g.n_nodes, splits_path);
        s.test = read_id_array(j, "test", g.n_nodes, splits_path);
        split = std::move(s);
    }

    return {std::move(g), std::move(split)};
}

void save_dataset(const Graph& g, const std::filesystem::path& dir, const DataSplit* split) {
    std::filesystem::create_directories(dir);

    {
        std::ofstream out(dir / "edges.tsv");
        if (!out) throw IoError("cannot write " + (dir / "edges.tsv").string());
        for (auto [u, v] : g.edges) out << u << '\t' << v << '\n';
    }
    {
        std::ofstream out(dir / "features.csv");
        if (!out) throw IoError("cannot write " + (dir / "features.csv").string());
        out.precision(17);
        for (std::int64_t i = 0; i < g.n_nodes; ++i) {
            for (std::int64_t j = 0; j < g.features.cols(); ++j) {
                if (j) out << ',';
                out << g.features.at(i, j);
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(dir / "labels.csv");
        if (!out) throw IoError("cannot write " + (dir / "labels.csv").string());
        for (int label : g.labels) out << label << '\n';
    }
    if (split) {
        std::ofstream out(dir / "splits.json");
        if (!out) throw IoError("cannot write " + (dir / "splits.json").string());
        nlohmann::json j{{"train", split->train}, {"val", split->val}, {"test", split->test}};
        out << j.dump(2) << '\n';
    }
}

}  // namespace connsearch::data
