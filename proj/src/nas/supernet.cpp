// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/nas/supernet.hpp"

#include <algorithm>

#include "connsearch/errors.hpp"

namespace connsearch::nas {

namespace {

using ad::Tensor;

Tensor alpha_row(std::int64_t n) {
    Tensor t(1, n);
    t.set_requires_grad();
    return t;
}

Fusion argmax_fusion(const Tensor& alpha) {
    int best = 0;
    for (int k = 1; k < kNumFusions; ++k)
        if (alpha.at(0, k) > alpha.at(0, best)) best = k;
    return static_cast<Fusion>(best);
}

}  // namespace

Supernet::Supernet(SupernetSpec spec, std::uint64_t seed) : spec_(spec) {
    if (spec_.n_gnn_blocks < 1) throw ArgumentError("supernet: n_gnn_blocks must be >= 1");
    if (spec_.hidden_dim < 1 || spec_.input_dim < 1 || spec_.n_classes < 1)
        throw ArgumentError("supernet: hidden_dim, input_dim and n_classes must be positive");
    ad::Rng rng = ad::Rng::substream(seed, "init");
    const std::int64_t d = spec_.hidden_dim;
    const int K = static_cast<int>(spec_.n_gnn_blocks);

    input_block_ = gnn::make_mlp(spec_.input_dim, d, d, gnn::Activation::kRelu, false, rng);
    for (int j = 1; j <= K; ++j) {
        if (spec_.gnn_kind == GnnKind::kSage)
            sage_.push_back(gnn::make_sage(d, rng));
        else
            gat_.push_back(gnn::make_gat(d, 1, 0.2, rng));
    }
    for (int j = 1; j <= K + 1; ++j)
        fusion_.push_back(make_fusion_params(d, K + 1, rng));
    head_ = gnn::make_mlp(d, d, spec_.n_classes, gnn::Activation::kRelu, true, rng);

    for (int j = 1; j <= K + 1; ++j)
        for (int i = 0; i < j; ++i) gates_.push_back({i, j, alpha_row(2)});
    for (int j = 1; j <= K + 1; ++j) selectors_.push_back({j, alpha_row(kNumFusions)});
}

std::int64_t Supernet::gate_index(int from, int to) const {
    if (from < 0 || to <= from || to > spec_.n_gnn_blocks + 1)
        throw ArgumentError("supernet: no gate (" + std::to_string(from) + " -> " +
                            std::to_string(to) + ")");
    return static_cast<std::int64_t>(to) * (to - 1) / 2 + from;
}

EdgeGate& Supernet::gate(int from, int to) { return gates_[gate_index(from, to)]; }
const EdgeGate& Supernet::gate(int from, int to) const { return gates_[gate_index(from, to)]; }

FusionSelector& Supernet::selector(int block) {
    if (block < 1 || block > spec_.n_gnn_blocks + 1)
        throw ArgumentError("supernet: no selector for block " + std::to_string(block));
    return selectors_[block - 1];
}
const FusionSelector& Supernet::selector(int block) const {
    return const_cast<Supernet*>(this)->selector(block);
}

Tensor Supernet::forward(ad::Tape& tape, const data::Graph& g, const GumbelConfig& cfg,
                         double dropout, ad::Rng* dropout_rng) const {
    if (g.features.cols() != spec_.input_dim)
        throw ShapeError("supernet: graph feature width " + std::to_string(g.features.cols()) +
                         ", expected " + std::to_string(spec_.input_dim));
    if (dropout > 0.0 && dropout_rng == nullptr)
        throw ArgumentError("supernet: dropout requires an rng");
    const int K = static_cast<int>(spec_.n_gnn_blocks);
    const std::int64_t d = spec_.hidden_dim;
    const bool hard = cfg.mode == GumbelConfig::Mode::kArgmax;

    std::vector<Tensor> outputs(K + 2);
    outputs[0] = gnn::mlp2_forward(tape, input_block_, g.features);

    for (int j = 1; j <= K + 1; ++j) {
        std::vector<Tensor> gathered;
        if (hard) {
            // one-hot gates: keep exactly the IDENTITY winners, drop the rest
            for (int i = 0; i < j; ++i) {
                const Tensor& a = gate(i, j).alpha;
                if (a.at(0, 1) > a.at(0, 0)) gathered.push_back(outputs[i]);
            }
        } else {
            for (int i = 0; i < j; ++i) {
                Tensor c = gumbel_softmax(tape, gate(i, j).alpha, cfg);
                gathered.push_back(edge_mix_with(tape, c, outputs[i]));
            }
        }

        Tensor fused;
        if (gathered.empty()) {
            fused = Tensor(g.n_nodes, d);  // every incoming gate chose ZERO
        } else if (hard) {
            fused = fusion_apply(tape, argmax_fusion(selector(j).alpha), gathered, fusion_[j - 1]);
        } else {
            Tensor c = gumbel_softmax(tape, selector(j).alpha, cfg);
            fused = fusion_mix_with(tape, c, gathered, fusion_[j - 1]);
        }

        if (j <= K) {
            Tensor h = spec_.gnn_kind == GnnKind::kSage
                           ? gnn::sage_forward(tape, sage_[j - 1], g, fused)
                           : gnn::gat_forward(tape, gat_[j - 1], g, fused);
            if (dropout > 0.0) h = tape.dropout(h, dropout, *dropout_rng);
            outputs[j] = h;
        } else {
            outputs[j] = gnn::mlp2_forward(tape, head_, fused);
        }
    }
    return outputs[K + 1];
}

Architecture Supernet::derive() const {
    const int K = static_cast<int>(spec_.n_gnn_blocks);
    std::vector<std::vector<int>> preds(K + 2);
    for (int j = 1; j <= K + 1; ++j)
        for (int i = 0; i < j; ++i) {
            const Tensor& a = gate(i, j).alpha;
            if (a.at(0, 1) > a.at(0, 0)) preds[j].push_back(i);
        }

    std::vector<char> alive(K + 2, 1);
    auto filter_alive = [&](std::vector<int>& p) {
        p.erase(std::remove_if(p.begin(), p.end(), [&](int i) { return !alive[i]; }), p.end());
    };

    // drop GNN blocks starved of inputs, repeatedly (removals can starve others)
    bool changed = true;
    while (changed) {
        changed = false;
        for (int j = 1; j <= K; ++j) {
            if (!alive[j]) continue;
            filter_alive(preds[j]);
            if (preds[j].empty()) {
                alive[j] = 0;
                changed = true;
            }
        }
    }

    filter_alive(preds[K + 1]);
    bool fallback = false;
    if (preds[K + 1].empty()) {
        int target = 0;
        for (int j = K; j >= 1; --j)
            if (alive[j]) {
                target = j;
                break;
            }
        preds[K + 1].push_back(target);
        fallback = true;
    }

    // keep only blocks the output actually consumes
    std::vector<char> reach(K + 2, 0);
    std::vector<int> stack{K + 1};
    reach[K + 1] = 1;
    while (!stack.empty()) {
        int j = stack.back();
        stack.pop_back();
        for (int i : preds[j])
            if (i >= 1 && !reach[i]) {
                reach[i] = 1;
                stack.push_back(i);
            }
    }
    for (int j = 1; j <= K; ++j)
        if (alive[j] && !reach[j]) alive[j] = 0;

    Architecture arch;
    arch.gnn_kind = spec_.gnn_kind;
    arch.hidden_dim = spec_.hidden_dim;
    arch.fallback_used = fallback;
    for (int j = 1; j <= K; ++j) {
        if (alive[j])
            arch.blocks.push_back({j, preds[j], argmax_fusion(selector(j).alpha)});
        else
            arch.pruned.push_back(j);
    }
    arch.blocks.push_back({K + 1, preds[K + 1], argmax_fusion(selector(K + 1).alpha)});
    arch.validate();
    return arch;
}

void Supernet::set_alphas_from(const Architecture& a, double magnitude) {
    const int K = static_cast<int>(spec_.n_gnn_blocks);
    if (a.output_block() != K + 1 || a.hidden_dim != spec_.hidden_dim ||
        a.gnn_kind != spec_.gnn_kind)
        throw ArgumentError("set_alphas_from: architecture does not match this supernet");
    for (auto& gt : gates_) {
        bool selected = false;
        if (const auto* b = a.find(gt.to))
            selected = std::binary_search(b->predecessors.begin(), b->predecessors.end(), gt.from);
        gt.alpha.at(0, 0) = selected ? -magnitude : magnitude;
        gt.alpha.at(0, 1) = selected ? magnitude : -magnitude;
    }
    for (auto& sel : selectors_) {
        const auto* b = a.find(sel.block);
        const int win = b ? static_cast<int>(b->fusion) : 0;
        for (int k = 0; k < kNumFusions; ++k)
            sel.alpha.at(0, k) = k == win ? magnitude : -magnitude;
    }
}

std::vector<Tensor> Supernet::weight_params() const {
    std::vector<Tensor> out;
    auto take = [&](const std::vector<Tensor>& ps) { out.insert(out.end(), ps.begin(), ps.end()); };
    take(input_block_.params());
    for (const auto& s : sage_) take(s.params());
    for (const auto& gp : gat_) take(gp.params());
    for (const auto& f : fusion_) take(f.params());
    take(head_.params());
    return out;
}

std::vector<Tensor> Supernet::alpha_params() const {
    std::vector<Tensor> out;
    for (const auto& gt : gates_) out.push_back(gt.alpha);
    for (const auto& sel : selectors_) out.push_back(sel.alpha);
    return out;
}

std::vector<std::pair<std::string, Tensor>> Supernet::named_params() const {
    std::vector<std::pair<std::string, Tensor>> out;
    out.emplace_back("block0.W0", input_block_.W0);
    out.emplace_back("block0.W1", input_block_.W1);
    const int K = static_cast<int>(spec_.n_gnn_blocks);
    for (int j = 1; j <= K; ++j) {
        const std::string p = "gnn" + std::to_string(j);
        if (spec_.gnn_kind == GnnKind::kSage) {
            out.emplace_back(p + ".W", sage_[j - 1].W);
            out.emplace_back(p + ".bias", sage_[j - 1].bias);
        } else {
            const auto& gp = gat_[j - 1];
            for (std::size_t h = 0; h < gp.W.size(); ++h) {
                const std::string ph = p + ".h" + std::to_string(h);
                out.emplace_back(ph + ".W", gp.W[h]);
                out.emplace_back(ph + ".a_src", gp.a_src[h]);
                out.emplace_back(ph + ".a_dst", gp.a_dst[h]);
            }
        }
    }
    for (int j = 1; j <= K + 1; ++j) {
        const std::string p = "fusion" + std::to_string(j);
        const auto& f = fusion_[j - 1];
        out.emplace_back(p + ".concat_proj", f.concat_proj);
        out.emplace_back(p + ".lstm.W_ih", f.lstm_w_ih);
        out.emplace_back(p + ".lstm.W_hh", f.lstm_w_hh);
        out.emplace_back(p + ".lstm.b", f.lstm_bias);
        out.emplace_back(p + ".att.W", f.att_w);
        out.emplace_back(p + ".att.q", f.att_q);
    }
    out.emplace_back("head.W0", head_.W0);
    out.emplace_back("head.W1", head_.W1);
    for (const auto& gt : gates_)
        out.emplace_back("alpha.gate." + std::to_string(gt.from) + "." + std::to_string(gt.to),
                         gt.alpha);
    for (const auto& sel : selectors_)
        out.emplace_back("alpha.fusion." + std::to_string(sel.block), sel.alpha);
    return out;
}

}  // namespace connsearch::nas
