// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/diag/oracle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <utility>

#include "connsearch/engine/train.hpp"
#include "connsearch/errors.hpp"

#include "json.hpp"

namespace connsearch::diag {

const std::vector<nas::Fusion>& all_fusions() {
    static const std::vector<nas::Fusion> fs = {nas::Fusion::kSum,    nas::Fusion::kMean,
                                                nas::Fusion::kMax,    nas::Fusion::kConcat,
                                                nas::Fusion::kLstm,   nas::Fusion::kAtt};
    return fs;
}

std::vector<nas::Architecture> enumerate_architectures(const nas::SupernetSpec& spec,
                                                       const std::vector<nas::Fusion>& fusion_subset,
                                                       std::int64_t cap) {
    if (spec.n_gnn_blocks < 0) throw ArgumentError("enumerate: n_gnn_blocks must be >= 0");
    if (fusion_subset.empty()) throw ArgumentError("enumerate: empty fusion subset");
    {
        std::set<nas::Fusion> seen(fusion_subset.begin(), fusion_subset.end());
        if (seen.size() != fusion_subset.size())
            throw ArgumentError("enumerate: duplicate fusion in subset");
    }
    const int out = static_cast<int>(spec.n_gnn_blocks) + 1;
    if (out >= 40) throw RefusalError("enumerate: block space too large to count");

    unsigned __int128 raw = 1;
    for (int j = 1; j <= out; ++j)
        raw *= static_cast<unsigned __int128>((1ULL << j) - 1) * fusion_subset.size();
    if (raw > static_cast<unsigned __int128>(cap)) {
        std::string digits;
        for (unsigned __int128 v = raw; v > 0; v /= 10)
            digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        throw RefusalError("enumerate: " + digits + " raw architectures exceed cap " +
                           std::to_string(cap));
    }

    nas::Fusion single = *std::min_element(fusion_subset.begin(), fusion_subset.end());

    struct Choice {
        std::uint32_t bits = 0;
        nas::Fusion fusion = nas::Fusion::kSum;
    };
    std::vector<std::vector<Choice>> menu(static_cast<std::size_t>(out));
    for (int j = 1; j <= out; ++j) {
        auto& m = menu[static_cast<std::size_t>(j - 1)];
        for (std::uint32_t bits = 1; bits < (1u << j); ++bits) {
            if (std::popcount(bits) == 1) {
                m.push_back({bits, single});
            } else {
                for (nas::Fusion f : fusion_subset) m.push_back({bits, f});
            }
        }
    }

    std::map<std::string, nas::Architecture> uniq;
    std::vector<std::size_t> idx(static_cast<std::size_t>(out), 0);
    while (true) {
        // Reverse reachability from the output block; preds of reachable
        // blocks are reachable, so one sweep from high to low ids suffices.
        std::vector<char> reach(static_cast<std::size_t>(out) + 1, 0);
        reach[static_cast<std::size_t>(out)] = 1;
        for (int j = out; j >= 1; --j) {
            if (!reach[static_cast<std::size_t>(j)]) continue;
            const Choice& c = menu[static_cast<std::size_t>(j - 1)][idx[static_cast<std::size_t>(j - 1)]];
            for (int p = 0; p < j; ++p)
                if (c.bits & (1u << p)) reach[static_cast<std::size_t>(p)] = 1;
        }

        nas::Architecture a;
        a.gnn_kind = spec.gnn_kind;
        a.hidden_dim = spec.hidden_dim;
        for (int j = 1; j <= out; ++j) {
            if (!reach[static_cast<std::size_t>(j)]) {
                a.pruned.push_back(j);
                continue;
            }
            const Choice& c = menu[static_cast<std::size_t>(j - 1)][idx[static_cast<std::size_t>(j - 1)]];
            nas::Architecture::Block b;
            b.id = j;
            b.fusion = c.fusion;
            for (int p = 0; p < j; ++p)
                if (c.bits & (1u << p)) b.predecessors.push_back(p);
            a.blocks.push_back(std::move(b));
        }
        a.validate();
        uniq.emplace(a.canonical_key(), std::move(a));

        std::size_t j = 0;
        while (j < static_cast<std::size_t>(out) && ++idx[j] == menu[j].size()) {
            idx[j] = 0;
            ++j;
        }
        if (j == static_cast<std::size_t>(out)) break;
    }

    std::vector<nas::Architecture> result;
    result.reserve(uniq.size());
    for (auto& [key, arch] : uniq) result.push_back(std::move(arch));
    return result;
}

OracleResult oracle_search(const nas::SupernetSpec& spec, const data::Graph& g,
                           const data::DataSplit& split, const engine::SearchConfig& cfg,
                           const std::vector<nas::Fusion>& fusion_subset) {
    std::vector<nas::Architecture> archs = enumerate_architectures(spec, fusion_subset);
    OracleResult res;
    res.total = static_cast<std::int64_t>(archs.size());
    res.ranking.reserve(archs.size());
    for (auto& a : archs) {
        engine::TrainedModel tm = engine::train_architecture(a, g, split, cfg);
        res.ranking.push_back({std::move(a), tm.best_val_acc, tm.test_acc});
    }
    std::stable_sort(res.ranking.begin(), res.ranking.end(),
                     [](const OracleEntry& x, const OracleEntry& y) { return x.val_acc > y.val_acc; });
    return res;
}

std::string OracleResult::to_json() const {
    nlohmann::json j;
    j["total"] = total;
    j["ranking"] = nlohmann::json::array();
    for (const auto& e : ranking)
        j["ranking"].push_back({{"architecture", nlohmann::json::parse(e.architecture.to_json())},
                                {"val_acc", e.val_acc},
                                {"test_acc", e.test_acc}});
    return j.dump(2);
}

}  // namespace connsearch::diag
