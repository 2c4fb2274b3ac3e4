// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace connsearch::nas {

// Candidate fusion operations, in serialization order. The indices are part
// of the meaning of serialized alphas, so the order never changes.
enum class Fusion { kSum = 0, kMean = 1, kMax = 2, kConcat = 3, kLstm = 4, kAtt = 5 };
inline constexpr int kNumFusions = 6;

enum class GnnKind { kSage, kGat };

std::string to_string(Fusion f);
Fusion fusion_from_string(const std::string& s);
std::string to_string(GnnKind k);
GnnKind gnn_kind_from_string(const std::string& s);

// A discrete architecture over blocks 0..K+1. Block 0 (the feature MLP) is
// implicit; `blocks` lists the retained GNN blocks and, last, the output
// block K+1, each with its predecessor set and fusion op. `pruned` lists the
// removed GNN block ids.
struct Architecture {
    struct Block {
        int id = 0;
        std::vector<int> predecessors;  // sorted ascending
        Fusion fusion = Fusion::kSum;
    };

    GnnKind gnn_kind = GnnKind::kSage;
    std::int64_t hidden_dim = 0;
    std::vector<Block> blocks;  // ascending by id; output block last
    std::vector<int> pruned;    // sorted ascending
    bool fallback_used = false;

    int output_block() const { return blocks.back().id; }
    int n_gnn_blocks() const { return output_block() - 1; }  // K
    bool retained(int id) const;
    const Block* find(int id) const;

    // Throws DomainError when the structural invariants are violated:
    // predecessors point at retained earlier blocks, every retained GNN
    // block lies on a path from block 0 to the output, the output block has
    // at least one predecessor.
    void validate() const;

    // Deterministic compact form; equal strings mean equal architectures.
    std::string canonical_key() const;

    std::string to_json() const;  // the search -> train contract
    static Architecture from_json(const std::string& text);
};

}  // namespace connsearch::nas
