// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/engine/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "connsearch/engine/metrics.hpp"
#include "connsearch/errors.hpp"
#include "connsearch/nas/gumbel.hpp"

#include "json.hpp"

namespace connsearch::engine {

void SearchConfig::validate() const {
    // Zero learning rates are legal: they freeze one parameter group, which
    // is how alternation isolation gets exercised.
    if (epochs < 0) throw ArgumentError("config: epochs must be >= 0");
    if (retrain_epochs < 1) throw ArgumentError("config: retrain_epochs must be >= 1");
    if (lr_w < 0.0) throw ArgumentError("config: lr_w must be >= 0");
    if (lr_alpha < 0.0) throw ArgumentError("config: lr_alpha must be >= 0");
    if (weight_decay_w < 0.0) throw ArgumentError("config: weight_decay_w must be >= 0");
    if (!(lambda_start > 0.0) || !(lambda_end > 0.0))
        throw ArgumentError("config: temperatures must be positive");
    if (lambda_end > lambda_start)
        throw ArgumentError("config: lambda_end must not exceed lambda_start");
    if (n_gnn_blocks < 1) throw ArgumentError("config: n_gnn_blocks must be >= 1");
    if (hidden_dim < 1) throw ArgumentError("config: hidden_dim must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ArgumentError("config: dropout must be in [0, 1)");
    if (patience < 1) throw ArgumentError("config: patience must be >= 1");
}

double lambda_at(const SearchConfig& cfg, std::int64_t epoch) {
    if (epoch < 0) throw ArgumentError("lambda_at: negative epoch");
    if (cfg.epochs <= 1) return cfg.lambda_start;
    double t = static_cast<double>(std::min(epoch, cfg.epochs - 1)) /
               static_cast<double>(cfg.epochs - 1);
    return cfg.lambda_start * std::pow(cfg.lambda_end / cfg.lambda_start, t);
}

namespace {

nas::SupernetSpec spec_from(const data::Graph& g, const SearchConfig& cfg) {
    cfg.validate();
    nas::SupernetSpec spec;
    spec.n_gnn_blocks = cfg.n_gnn_blocks;
    spec.hidden_dim = cfg.hidden_dim;
    spec.gnn_kind = cfg.gnn_kind;
    spec.input_dim = g.features.cols();
    spec.n_classes = g.n_classes;
    return spec;
}

}  // namespace

SearchRun::SearchRun(const data::Graph& g, const SearchConfig& cfg)
    : net(spec_from(g, cfg), cfg.seed),
      gumbel(ad::Rng::substream(cfg.seed, "gumbel")),
      dropout(ad::Rng::substream(cfg.seed, "dropout")),
      w_params(net.weight_params()),
      alpha_params(net.alpha_params()) {}

EpochRecord alternate_step(SearchRun& run, const data::Graph& g, const data::DataSplit& split,
                           const SearchConfig& cfg, std::int64_t epoch) {
    if (split.train.empty() || split.val.empty())
        throw ArgumentError("search: train and val masks must be nonempty");

    EpochRecord rec;
    rec.lambda = lambda_at(cfg, epoch);
    nas::GumbelConfig gc;
    gc.lambda = rec.lambda;
    gc.rng = &run.gumbel;

    auto zero_all = [&run] {
        for (auto& p : run.w_params) p.zero_grad();
        for (auto& p : run.alpha_params) p.zero_grad();
    };

    {
        zero_all();
        ad::Tape tape;
        ad::Tensor logits = run.net.forward(tape, g, gc, cfg.dropout, &run.dropout);
        ad::Tensor loss = tape.cross_entropy(logits, g.labels, split.train);
        rec.train_loss = loss.item();
        if (!std::isfinite(rec.train_loss))
            throw NumericError("search: non-finite training loss at epoch " +
                               std::to_string(epoch));
        tape.backward(loss);
        ad::adam_step(run.w_params, cfg.lr_w, 0.9, 0.999, 1e-8, run.w_opt, cfg.weight_decay_w);
    }
    {
        zero_all();
        ad::Tape tape;
        ad::Tensor logits = run.net.forward(tape, g, gc, cfg.dropout, &run.dropout);
        ad::Tensor loss = tape.cross_entropy(logits, g.labels, split.val);
        rec.val_loss = loss.item();
        if (!std::isfinite(rec.val_loss))
            throw NumericError("search: non-finite validation loss at epoch " +
                               std::to_string(epoch));
        rec.val_acc = accuracy(logits, g.labels, split.val);
        tape.backward(loss);
        ad::adam_step(run.alpha_params, cfg.lr_alpha, 0.9, 0.999, 1e-8, run.alpha_opt, 0.0);
    }
    return rec;
}

std::pair<nas::Architecture, SearchReport> run_search(const data::Graph& g,
                                                      const data::DataSplit& split,
                                                      const SearchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    SearchRun run(g, cfg);

    SearchReport report;
    report.seed = cfg.seed;
    report.epochs.reserve(static_cast<std::size_t>(cfg.epochs));
    for (std::int64_t e = 0; e < cfg.epochs; ++e)
        report.epochs.push_back(alternate_step(run, g, split, cfg, e));

    nas::Architecture arch = run.net.derive();
    report.architecture = arch;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(arch), std::move(report)};
}

std::string SearchReport::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["wall_seconds"] = wall_seconds;
    j["architecture"] = nlohmann::json::parse(architecture.to_json());
    j["epochs"] = nlohmann::json::array();
    for (const auto& e : epochs)
        j["epochs"].push_back({{"train_loss", e.train_loss},
                               {"val_loss", e.val_loss},
                               {"val_acc", e.val_acc},
                               {"lambda", e.lambda}});
    return j.dump(2);
}

nas::Architecture build_baseline(const std::string& name, const SearchConfig& cfg) {
    cfg.validate();
    const int k = static_cast<int>(cfg.n_gnn_blocks);
    const int out = k + 1;

    nas::Architecture a;
    a.gnn_kind = cfg.gnn_kind;
    a.hidden_dim = cfg.hidden_dim;

    int depth = 0;
    if (name.starts_with("stack") && name.size() > 5 && name.size() <= 9 &&
        name.find_first_not_of("0123456789", 5) == std::string::npos) {
        depth = std::stoi(name.substr(5));
        if (depth < 1) throw ArgumentError("baseline " + name + ": depth must be >= 1");
        if (k < depth) throw ArgumentError("baseline " + name + ": needs n_gnn_blocks >= " +
                                           std::to_string(depth));
        for (int j = 1; j <= depth; ++j) a.blocks.push_back({j, {j - 1}, nas::Fusion::kSum});
        a.blocks.push_back({out, {depth}, nas::Fusion::kSum});
    } else if (name == "resgcn4") {
        depth = 4;
        if (k < depth) throw ArgumentError("baseline resgcn4: needs n_gnn_blocks >= 4");
        for (int j = 1; j <= depth; ++j) {
            std::vector<int> preds = j >= 2 ? std::vector<int>{j - 2, j - 1}
                                            : std::vector<int>{0};
            a.blocks.push_back({j, std::move(preds), nas::Fusion::kSum});
        }
        a.blocks.push_back({out, {depth - 1, depth}, nas::Fusion::kSum});
    } else if (name == "densegcn4") {
        depth = 4;
        if (k < depth) throw ArgumentError("baseline densegcn4: needs n_gnn_blocks >= 4");
        for (int j = 1; j <= depth; ++j) {
            std::vector<int> preds(static_cast<std::size_t>(j));
            for (int i = 0; i < j; ++i) preds[static_cast<std::size_t>(i)] = i;
            a.blocks.push_back({j, std::move(preds), nas::Fusion::kConcat});
        }
        std::vector<int> preds(static_cast<std::size_t>(depth) + 1);
        for (int i = 0; i <= depth; ++i) preds[static_cast<std::size_t>(i)] = i;
        a.blocks.push_back({out, std::move(preds), nas::Fusion::kConcat});
    } else if (name == "jknet4") {
        depth = 4;
        if (k < depth) throw ArgumentError("baseline jknet4: needs n_gnn_blocks >= 4");
        for (int j = 1; j <= depth; ++j) a.blocks.push_back({j, {j - 1}, nas::Fusion::kSum});
        a.blocks.push_back({out, {1, 2, 3, 4}, nas::Fusion::kMax});
    } else {
        throw ArgumentError("unknown baseline '" + name + "'");
    }

    for (int j = depth + 1; j <= k; ++j) a.pruned.push_back(j);
    a.validate();
    return a;
}

}  // namespace connsearch::engine
