// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/diag/mad.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "connsearch/ad/tape.hpp"
#include "connsearch/engine/train.hpp"
#include "connsearch/errors.hpp"

#include "json.hpp"

namespace connsearch::diag {

double mad(const ad::Tensor& features, const std::function<bool(int, int)>& mask) {
    const std::int64_t n = features.rows();
    const std::int64_t d = features.cols();
    if (n < 2) throw ArgumentError("mad: needs at least 2 rows");

    std::vector<double> sq(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (std::int64_t c = 0; c < d; ++c) s += features.at(r, c) * features.at(r, c);
        sq[static_cast<std::size_t>(r)] = s;
    }

    double total = 0.0;
    std::int64_t rows_counted = 0;
    for (std::int64_t u = 0; u < n; ++u) {
        double acc = 0.0;
        std::int64_t cnt = 0;
        for (std::int64_t v = 0; v < n; ++v) {
            if (u == v || !mask(static_cast<int>(u), static_cast<int>(v))) continue;
            double cos = 0.0;
            const double a = sq[static_cast<std::size_t>(u)];
            const double b = sq[static_cast<std::size_t>(v)];
            if (a > 0.0 && b > 0.0) {
                double dot = 0.0;
                for (std::int64_t c = 0; c < d; ++c) dot += features.at(u, c) * features.at(v, c);
                cos = std::sqrt((dot / a) * (dot / b));
                if (dot < 0.0) cos = -cos;
                cos = std::clamp(cos, -1.0, 1.0);
            }
            acc += 1.0 - cos;
            ++cnt;
        }
        if (cnt > 0) {
            total += acc / static_cast<double>(cnt);
            ++rows_counted;
        }
    }
    if (rows_counted == 0) throw DiagnosticError("mad: empty mask");
    return total / static_cast<double>(rows_counted);
}

double mad(const ad::Tensor& features, const std::vector<int>& nodes) {
    std::vector<char> in(static_cast<std::size_t>(features.rows()), 0);
    for (int v : nodes) {
        if (v < 0 || v >= features.rows())
            throw ArgumentError("mad: node " + std::to_string(v) + " out of range");
        in[static_cast<std::size_t>(v)] = 1;
    }
    return mad(features, [&in](int u, int v) { return in[u] && in[v]; });
}

MadReport mad_depth_sweep(const data::Graph& g, const data::DataSplit& split,
                          const DepthMethod& method, const std::vector<int>& depths,
                          const engine::SearchConfig& cfg) {
    for (int depth : depths)
        if (depth < 2) throw ArgumentError("mad_depth_sweep: depth must be >= 2");

    MadReport report;
    report.rows.reserve(depths.size());
    for (int depth : depths) {
        nas::Architecture arch = method(depth);
        engine::TrainedModel tm = engine::train_architecture(arch, g, split, cfg);
        ad::Tape eval(ad::Tape::Mode::kNoGrad);
        ad::Tensor pre_head;
        tm.model->forward(eval, g, 0.0, nullptr, &pre_head);
        report.rows.push_back({depth, tm.test_acc, mad(pre_head, split.test)});
    }
    return report;
}

std::string MadReport::to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"depth", r.depth}, {"accuracy", r.accuracy}, {"mad", r.mad}});
    return j.dump(2);
}

std::string MadReport::to_csv() const {
    std::ostringstream out;
    out << "depth,accuracy,mad\n" << std::setprecision(17);
    for (const auto& r : rows) out << r.depth << ',' << r.accuracy << ',' << r.mad << '\n';
    return out.str();
}

}  // namespace connsearch::diag
