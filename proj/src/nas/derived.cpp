// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/nas/derived.hpp"

#include <unordered_map>

#include "connsearch/errors.hpp"

namespace connsearch::nas {

using ad::Tensor;

DerivedModel::DerivedModel(Architecture arch, std::int64_t input_dim, std::int64_t n_classes,
                           std::uint64_t seed)
    : arch_(std::move(arch)), input_dim_(input_dim), n_classes_(n_classes) {
    arch_.validate();
    if (input_dim_ < 1 || n_classes_ < 1)
        throw ArgumentError("derived model: input_dim and n_classes must be positive");
    ad::Rng rng = ad::Rng::substream(seed, "init");
    const std::int64_t d = arch_.hidden_dim;
    const std::int64_t max_inputs = arch_.output_block();  // K + 1

    input_block_ = gnn::make_mlp(input_dim_, d, d, gnn::Activation::kRelu, false, rng);
    for (const auto& b : arch_.blocks) {
        if (b.id < arch_.output_block()) {
            if (arch_.gnn_kind == GnnKind::kSage)
                sage_.emplace(b.id, gnn::make_sage(d, rng));
            else
                gat_.emplace(b.id, gnn::make_gat(d, 1, 0.2, rng));
        }
        FusionParams f;
        f.d = d;
        f.max_inputs = max_inputs;
        switch (b.fusion) {
            case Fusion::kConcat:
                f.concat_proj = Tensor::glorot(max_inputs * d, d, rng);
                break;
            case Fusion::kLstm:
                f.lstm_w_ih = Tensor::glorot(d, 4 * d, rng);
                f.lstm_w_hh = Tensor::glorot(d, 4 * d, rng);
                f.lstm_bias = Tensor(1, 4 * d);
                f.lstm_bias.set_requires_grad();
                break;
            case Fusion::kAtt:
                f.att_w = Tensor::glorot(d, d, rng);
                f.att_q = Tensor::glorot(d, 1, rng);
                break;
            default: break;  // SUM/MEAN/MAX carry no weights
        }
        fusion_.emplace(b.id, std::move(f));
    }
    head_ = gnn::make_mlp(d, d, n_classes_, gnn::Activation::kRelu, true, rng);
}

Tensor DerivedModel::forward(ad::Tape& tape, const data::Graph& g, double dropout,
                             ad::Rng* dropout_rng, Tensor* pre_head) const {
    if (g.features.cols() != input_dim_)
        throw ShapeError("derived model: graph feature width " +
                         std::to_string(g.features.cols()) + ", expected " +
                         std::to_string(input_dim_));
    if (dropout > 0.0 && dropout_rng == nullptr)
        throw ArgumentError("derived model: dropout requires an rng");

    std::map<int, Tensor> outs;
    outs[0] = gnn::mlp2_forward(tape, input_block_, g.features);
    Tensor logits;
    for (const auto& b : arch_.blocks) {
        std::vector<Tensor> ins;
        ins.reserve(b.predecessors.size());
        for (int i : b.predecessors) ins.push_back(outs.at(i));
        Tensor fused = fusion_apply(tape, b.fusion, ins, fusion_.at(b.id));
        if (b.id == arch_.output_block()) {
            if (pre_head) *pre_head = fused;
            logits = gnn::mlp2_forward(tape, head_, fused);
        } else {
            Tensor h = arch_.gnn_kind == GnnKind::kSage
                           ? gnn::sage_forward(tape, sage_.at(b.id), g, fused)
                           : gnn::gat_forward(tape, gat_.at(b.id), g, fused);
            if (dropout > 0.0) h = tape.dropout(h, dropout, *dropout_rng);
            outs[b.id] = h;
        }
    }
    return logits;
}

std::vector<Tensor> DerivedModel::params() const {
    std::vector<Tensor> out;
    for (const auto& [name, t] : named_params()) out.push_back(t);
    return out;
}

std::vector<std::pair<std::string, Tensor>> DerivedModel::named_params() const {
    std::vector<std::pair<std::string, Tensor>> out;
    out.emplace_back("block0.W0", input_block_.W0);
    out.emplace_back("block0.W1", input_block_.W1);
    for (const auto& [id, s] : sage_) {
        const std::string p = "gnn" + std::to_string(id);
        out.emplace_back(p + ".W", s.W);
        out.emplace_back(p + ".bias", s.bias);
    }
    for (const auto& [id, gp] : gat_) {
        const std::string p = "gnn" + std::to_string(id);
        for (std::size_t h = 0; h < gp.W.size(); ++h) {
            const std::string ph = p + ".h" + std::to_string(h);
            out.emplace_back(ph + ".W", gp.W[h]);
            out.emplace_back(ph + ".a_src", gp.a_src[h]);
            out.emplace_back(ph + ".a_dst", gp.a_dst[h]);
        }
    }
    for (const auto& b : arch_.blocks) {
        const std::string p = "fusion" + std::to_string(b.id);
        const auto& f = fusion_.at(b.id);
        switch (b.fusion) {
            case Fusion::kConcat: out.emplace_back(p + ".concat_proj", f.concat_proj); break;
            case Fusion::kLstm:
                out.emplace_back(p + ".lstm.W_ih", f.lstm_w_ih);
                out.emplace_back(p + ".lstm.W_hh", f.lstm_w_hh);
                out.emplace_back(p + ".lstm.b", f.lstm_bias);
                break;
            case Fusion::kAtt:
                out.emplace_back(p + ".att.W", f.att_w);
                out.emplace_back(p + ".att.q", f.att_q);
                break;
            default: break;
        }
    }
    out.emplace_back("head.W0", head_.W0);
    out.emplace_back("head.W1", head_.W1);
    return out;
}

std::size_t copy_shared_params(const std::vector<std::pair<std::string, Tensor>>& src,
                               const std::vector<std::pair<std::string, Tensor>>& dst) {
    std::unordered_map<std::string, const Tensor*> by_name;
    for (const auto& [name, t] : src) by_name.emplace(name, &t);
    std::size_t copied = 0;
    for (const auto& [name, t] : dst) {
        auto it = by_name.find(name);
        if (it == by_name.end()) continue;
        Tensor handle = t;  // handles share storage
        handle.copy_values_from(*it->second);
        ++copied;
    }
    return copied;
}

}  // namespace connsearch::nas
