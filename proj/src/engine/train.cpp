// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/engine/train.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "connsearch/ad/adam.hpp"
#include "connsearch/engine/metrics.hpp"
#include "connsearch/errors.hpp"

#include "json.hpp"

namespace connsearch::engine {

TrainedModel train_architecture(const nas::Architecture& arch, const data::Graph& g,
                                const data::DataSplit& split, const SearchConfig& cfg) {
    cfg.validate();
    arch.validate();
    if (split.train.empty() || split.val.empty() || split.test.empty())
        throw ArgumentError("train: train, val and test masks must be nonempty");

    const auto t0 = std::chrono::steady_clock::now();

    TrainedModel tm;
    tm.architecture = arch;
    tm.seed = cfg.seed;
    tm.model =
        std::make_shared<nas::DerivedModel>(arch, g.features.cols(), g.n_classes, cfg.seed);

    ad::Rng dropout_rng = ad::Rng::substream(cfg.seed, "dropout");
    ad::AdamState opt;
    std::vector<ad::Tensor> params = tm.model->params();

    double best_val_loss = std::numeric_limits<double>::infinity();
    std::int64_t stale = 0;
    tm.best_val_acc = -1.0;
    std::vector<std::vector<double>> best_weights;

    for (std::int64_t e = 0; e < cfg.retrain_epochs; ++e) {
        for (auto& p : params) p.zero_grad();
        ad::Tape tape;
        ad::Tensor logits = tm.model->forward(tape, g, cfg.dropout, &dropout_rng);
        ad::Tensor loss = tape.cross_entropy(logits, g.labels, split.train);
        RetrainEpoch rec;
        rec.train_loss = loss.item();
        if (!std::isfinite(rec.train_loss))
            throw NumericError("train: non-finite training loss at epoch " + std::to_string(e));
        tape.backward(loss);
        ad::adam_step(params, cfg.lr_w, 0.9, 0.999, 1e-8, opt, cfg.weight_decay_w);

        // Post-step scoring without dropout.
        ad::Tape eval(ad::Tape::Mode::kNoGrad);
        ad::Tensor elogits = tm.model->forward(eval, g);
        rec.val_loss = eval.cross_entropy(elogits, g.labels, split.val).item();
        if (!std::isfinite(rec.val_loss))
            throw NumericError("train: non-finite validation loss at epoch " + std::to_string(e));
        rec.val_acc = accuracy(elogits, g.labels, split.val);
        rec.test_acc = accuracy(elogits, g.labels, split.test);
        tm.history.push_back(rec);

        if (rec.val_acc > tm.best_val_acc) {
            tm.best_val_acc = rec.val_acc;
            tm.best_epoch = e;
            best_weights.clear();
            best_weights.reserve(params.size());
            for (const auto& p : params) best_weights.push_back(p.values());
        }
        if (rec.val_loss < best_val_loss) {
            best_val_loss = rec.val_loss;
            stale = 0;
        } else if (++stale >= cfg.patience) {
            break;
        }
    }

    tm.epochs_run = static_cast<std::int64_t>(tm.history.size());
    tm.test_acc = tm.history[static_cast<std::size_t>(tm.best_epoch)].test_acc;
    for (std::size_t i = 0; i < params.size(); ++i) params[i].values() = best_weights[i];

    tm.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return tm;
}

std::string TrainedModel::metrics_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    j["wall_seconds"] = wall_seconds;
    j["architecture"] = nlohmann::json::parse(architecture.to_json());
    j["best_val_acc"] = best_val_acc;
    j["test_acc"] = test_acc;
    j["best_epoch"] = best_epoch;
    j["epochs_run"] = epochs_run;
    j["epochs"] = nlohmann::json::array();
    for (const auto& e : history)
        j["epochs"].push_back({{"train_loss", e.train_loss},
                               {"val_loss", e.val_loss},
                               {"val_acc", e.val_acc}});
    return j.dump(2);
}

}  // namespace connsearch::engine
