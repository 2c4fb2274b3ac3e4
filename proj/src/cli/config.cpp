// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "connsearch/errors.hpp"

namespace connsearch::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void require_known(const std::string& key) {
    if (!default_config().count(key)) throw ArgumentError("config: unknown key '" + key + "'");
}

}  // namespace

const ConfigMap& default_config() {
    static const ConfigMap defaults = {
        // search / retraining
        {"epochs", "200"},
        {"retrain_epochs", "300"},
        {"lr_w", "0.005"},
        {"lr_alpha", "0.003"},
        {"weight_decay_w", "0.0005"},
        {"lambda_start", "1.0"},
        {"lambda_end", "0.05"},
        {"seed", "0"},
        {"seeds", "1"},
        {"gnn", "sage"},
        {"blocks", "4"},
        {"hidden", "64"},
        {"dropout", "0"},
        {"patience", "30"},
        // dataset handling
        {"data", ""},
        {"out", "out"},
        {"train_ratio", "0.4"},
        {"val_ratio", "0.3"},
        {"test_ratio", "0.3"},
        // command-specific selectors
        {"architecture", ""},
        {"baseline", ""},
        {"depths", "2,4,8"},
        {"method", "stack"},
        {"fusion_subset", "SUM,MEAN,MAX,CONCAT,LSTM,ATT"},
        // synthetic data generation
        {"communities", "2"},
        {"nodes_per_community", "30"},
        {"p_in", "0.3"},
        {"p_out", "0.05"},
        {"feature_dim", "16"},
        {"feature_noise", "0.5"},
    };
    return defaults;
}

ConfigMap parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path.string());
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw FormatError("config: line " + std::to_string(lineno) + " has an empty key");
        require_known(key);
        if (!out.emplace(key, value).second)
            throw FormatError("config: duplicate key '" + key + "'");
    }
    return out;
}

ConfigMap apply_overrides(const ConfigMap& base, const ConfigMap& overrides) {
    ConfigMap out = base;
    for (const auto& [k, v] : overrides) {
        require_known(k);
        out[k] = v;
    }
    return out;
}

ConfigMap resolve_config(const ConfigMap& file_values, const ConfigMap& overrides) {
    return apply_overrides(apply_overrides(default_config(), file_values), overrides);
}

const std::string& get_str(const ConfigMap& cfg, const std::string& key) {
    const auto it = cfg.find(key);
    if (it == cfg.end()) throw ArgumentError("config: missing key '" + key + "'");
    return it->second;
}

std::int64_t get_int(const ConfigMap& cfg, const std::string& key) {
    const std::string& v = get_str(cfg, key);
    try {
        std::size_t used = 0;
        const long long parsed = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return parsed;
    } catch (const std::exception&) {
        throw ArgumentError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

std::uint64_t get_u64(const ConfigMap& cfg, const std::string& key) {
    const std::string& v = get_str(cfg, key);
    try {
        std::size_t used = 0;
        const unsigned long long parsed = std::stoull(v, &used);
        if (used != v.size() || v.find('-') != std::string::npos) throw std::invalid_argument(v);
        return parsed;
    } catch (const std::exception&) {
        throw ArgumentError("config: key '" + key + "' expects a non-negative integer, got '" +
                            v + "'");
    }
}

double get_real(const ConfigMap& cfg, const std::string& key) {
    const std::string& v = get_str(cfg, key);
    try {
        std::size_t used = 0;
        const double parsed = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return parsed;
    } catch (const std::exception&) {
        throw ArgumentError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError("config: key '" + key + "' has a non-integer entry '" + item +
                                "'");
        }
    }
    return out;
}

std::vector<nas::Fusion> parse_fusion_list(const std::string& text) {
    std::vector<nas::Fusion> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(nas::fusion_from_string(item));
    }
    return out;
}

engine::SearchConfig to_search_config(const ConfigMap& cfg) {
    engine::SearchConfig sc;
    sc.epochs = get_int(cfg, "epochs");
    sc.retrain_epochs = get_int(cfg, "retrain_epochs");
    sc.lr_w = get_real(cfg, "lr_w");
    sc.lr_alpha = get_real(cfg, "lr_alpha");
    sc.weight_decay_w = get_real(cfg, "weight_decay_w");
    sc.lambda_start = get_real(cfg, "lambda_start");
    sc.lambda_end = get_real(cfg, "lambda_end");
    sc.seed = get_u64(cfg, "seed");
    sc.gnn_kind = nas::gnn_kind_from_string(get_str(cfg, "gnn"));
    sc.n_gnn_blocks = get_int(cfg, "blocks");
    sc.hidden_dim = get_int(cfg, "hidden");
    sc.dropout = get_real(cfg, "dropout");
    sc.patience = get_int(cfg, "patience");
    sc.validate();
    return sc;
}

}  // namespace connsearch::cli
