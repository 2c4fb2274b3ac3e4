// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/nas/architecture.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "connsearch/errors.hpp"

namespace connsearch::nas {

namespace {
constexpr const char* kFusionNames[kNumFusions] = {"SUM", "MEAN", "MAX", "CONCAT", "LSTM", "ATT"};
}

std::string to_string(Fusion f) { return kFusionNames[static_cast<int>(f)]; }

Fusion fusion_from_string(const std::string& s) {
    for (int k = 0; k < kNumFusions; ++k)
        if (s == kFusionNames[k]) return static_cast<Fusion>(k);
    throw FormatError("unknown fusion op '" + s + "'");
}

std::string to_string(GnnKind k) { return k == GnnKind::kSage ? "sage" : "gat"; }

GnnKind gnn_kind_from_string(const std::string& s) {
    if (s == "sage") return GnnKind::kSage;
    if (s == "gat") return GnnKind::kGat;
    throw FormatError("unknown gnn kind '" + s + "' (expected 'sage' or 'gat')");
}

bool Architecture::retained(int id) const { return find(id) != nullptr; }

const Architecture::Block* Architecture::find(int id) const {
    for (const auto& b : blocks)
        if (b.id == id) return &b;
    return nullptr;
}

void Architecture::validate() const {
    if (hidden_dim <= 0) throw DomainError("architecture: hidden_dim must be positive");
    if (blocks.empty()) throw DomainError("architecture: no output block");
    const int out = blocks.back().id;
    if (out < 1) throw DomainError("architecture: output block id must be at least 1");

    std::set<int> ids;
    for (const auto& b : blocks) {
        if (b.id < 1 || b.id > out)
            throw DomainError("architecture: block id " + std::to_string(b.id) + " outside [1, " +
                              std::to_string(out) + "]");
        if (!ids.insert(b.id).second)
            throw DomainError("architecture: duplicate block id " + std::to_string(b.id));
    }
    if (!std::is_sorted(blocks.begin(), blocks.end(),
                        [](const Block& a, const Block& b) { return a.id < b.id; }))
        throw DomainError("architecture: blocks must be ascending by id");
    for (int p : pruned) {
        if (p < 1 || p > out - 1)
            throw DomainError("architecture: pruned id " + std::to_string(p) +
                              " is not a gnn block");
        if (ids.count(p)) throw DomainError("architecture: block " + std::to_string(p) +
                                            " both retained and pruned");
    }
    if (static_cast<int>(blocks.size() + pruned.size()) != out)
        throw DomainError("architecture: retained plus pruned must cover blocks 1.." +
                          std::to_string(out));

    for (const auto& b : blocks) {
        if (b.predecessors.empty())
            throw DomainError("architecture: block " + std::to_string(b.id) +
                              " has no predecessors");
        if (!std::is_sorted(b.predecessors.begin(), b.predecessors.end()))
            throw DomainError("architecture: block " + std::to_string(b.id) +
                              " predecessors not sorted");
        for (int p : b.predecessors) {
            if (p < 0 || p >= b.id)
                throw DomainError("architecture: block " + std::to_string(b.id) +
                                  " has invalid predecessor " + std::to_string(p));
            if (p != 0 && !ids.count(p))
                throw DomainError("architecture: block " + std::to_string(b.id) +
                                  " references pruned block " + std::to_string(p));
        }
    }

    // every retained GNN block must reach the output through retained edges
    std::set<int> reaches{out};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& b : blocks) {
            if (!reaches.count(b.id)) continue;
            for (int p : b.predecessors)
                if (p != 0 && !reaches.count(p)) {
                    reaches.insert(p);
                    grew = true;
                }
        }
    }
    for (const auto& b : blocks)
        if (b.id != out && !reaches.count(b.id))
            throw DomainError("architecture: block " + std::to_string(b.id) +
                              " has no path to the output block");
}

std::string Architecture::canonical_key() const {
    std::string key = to_string(gnn_kind) + "|d" + std::to_string(hidden_dim);
    for (const auto& b : blocks) {
        key += "|b" + std::to_string(b.id) + ":";
        for (std::size_t i = 0; i < b.predecessors.size(); ++i) {
            if (i) key += ",";
            key += std::to_string(b.predecessors[i]);
        }
        key += ":" + to_string(b.fusion);
    }
    return key;
}

std::string Architecture::to_json() const {
    nlohmann::json j;
    j["gnn_kind"] = to_string(gnn_kind);
    j["hidden_dim"] = hidden_dim;
    j["blocks"] = nlohmann::json::array();
    for (const auto& b : blocks)
        j["blocks"].push_back({{"id", b.id},
                               {"predecessors", b.predecessors},
                               {"fusion", to_string(b.fusion)}});
    j["pruned"] = pruned;
    j["fallback_used"] = fallback_used;
    return j.dump(2);
}

Architecture Architecture::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("architecture: " + std::string(e.what()));
    }
    Architecture a;
    try {
        a.gnn_kind = gnn_kind_from_string(j.at("gnn_kind").get<std::string>());
        a.hidden_dim = j.at("hidden_dim").get<std::int64_t>();
        if (!j.at("blocks").is_array() || j["blocks"].empty())
            throw FormatError("architecture: 'blocks' must be a nonempty array");
        std::size_t idx = 0;
        for (const auto& jb : j["blocks"]) {
            Architecture::Block b;
            try {
                b.id = jb.at("id").get<int>();
                b.predecessors = jb.at("predecessors").get<std::vector<int>>();
                b.fusion = fusion_from_string(jb.at("fusion").get<std::string>());
            } catch (const nlohmann::json::exception& e) {
                throw FormatError("architecture: blocks[" + std::to_string(idx) + "]: " +
                                  std::string(e.what()));
            }
            a.blocks.push_back(std::move(b));
            ++idx;
        }
        a.pruned = j.at("pruned").get<std::vector<int>>();
        a.fallback_used = j.at("fallback_used").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("architecture: " + std::string(e.what()));
    }
    try {
        a.validate();
    } catch (const DomainError& e) {
        throw FormatError(e.what());
    }
    return a;
}

}  // namespace connsearch::nas
