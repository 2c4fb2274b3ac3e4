// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "connsearch/cli/manifest.hpp"
#include "connsearch/data/io.hpp"
#include "connsearch/diag/mad.hpp"
#include "connsearch/diag/oracle.hpp"
#include "connsearch/engine/search.hpp"
#include "connsearch/engine/train.hpp"
#include "connsearch/errors.hpp"

#include "json.hpp"

namespace connsearch::cli {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint64_t> seed_list(const ConfigMap& cfg) {
    const std::uint64_t base = get_u64(cfg, "seed");
    const std::int64_t n = get_int(cfg, "seeds");
    if (n < 1) throw ArgumentError("config: seeds must be >= 1");
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = base + i;
    return out;
}

// The split is tied to the base seed (substream "split"), never to the
// per-run seeds, so every seed trains against the same node partition.
std::pair<data::Graph, data::DataSplit> load_with_split(const ConfigMap& cfg) {
    const std::string dir = get_str(cfg, "data");
    if (dir.empty()) throw ArgumentError("config: 'data' must point at a dataset directory");
    auto [g, stored] = data::load_dataset(dir);
    if (stored) return {std::move(g), std::move(*stored)};
    data::DataSplit split = data::split_nodes(
        g, get_real(cfg, "train_ratio"), get_real(cfg, "val_ratio"), get_real(cfg, "test_ratio"),
        ad::Rng::substream_seed(get_u64(cfg, "seed"), "split"));
    return {std::move(g), std::move(split)};
}

nas::Architecture architecture_for_train(const ConfigMap& cfg,
                                         const engine::SearchConfig& sc) {
    const std::string& file = get_str(cfg, "architecture");
    const std::string& baseline = get_str(cfg, "baseline");
    if (!file.empty() && !baseline.empty())
        throw ArgumentError("train: give either 'architecture' or 'baseline', not both");
    if (!file.empty()) return nas::Architecture::from_json(read_text(file));
    if (!baseline.empty()) return engine::build_baseline(baseline, sc);
    throw ArgumentError("train: one of 'architecture' or 'baseline' is required");
}

nas::SupernetSpec spec_for(const ConfigMap& cfg, const data::Graph& g) {
    nas::SupernetSpec spec;
    spec.n_gnn_blocks = get_int(cfg, "blocks");
    spec.hidden_dim = get_int(cfg, "hidden");
    spec.gnn_kind = nas::gnn_kind_from_string(get_str(cfg, "gnn"));
    spec.input_dim = g.features.cols();
    spec.n_classes = g.n_classes;
    return spec;
}

void cmd_search(const ConfigMap& cfg, const fs::path& out, std::ostream& log) {
    auto [g, split] = load_with_split(cfg);
    for (const std::uint64_t s : seed_list(cfg)) {
        engine::SearchConfig sc = to_search_config(cfg);
        sc.seed = s;
        auto [arch, report] = engine::run_search(g, split, sc);
        write_text(out / ("architecture_" + std::to_string(s) + ".json"), arch.to_json());
        write_text(out / ("search_report_" + std::to_string(s) + ".json"), report.to_json());
        const double final_val = report.epochs.empty() ? 0.0 : report.epochs.back().val_acc;
        log << "search seed=" << s << " epochs=" << report.epochs.size()
            << " val_acc=" << final_val << " key=" << arch.canonical_key() << "\n";
    }
}

void cmd_train(const ConfigMap& cfg, const fs::path& out, std::ostream& log) {
    auto [g, split] = load_with_split(cfg);
    const nas::Architecture arch = architecture_for_train(cfg, to_search_config(cfg));
    std::vector<double> accs;
    for (const std::uint64_t s : seed_list(cfg)) {
        engine::SearchConfig sc = to_search_config(cfg);
        sc.seed = s;
        engine::TrainedModel tm = engine::train_architecture(arch, g, split, sc);
        write_text(out / ("metrics_" + std::to_string(s) + ".json"), tm.metrics_json());
        accs.push_back(tm.test_acc);
        log << "train seed=" << s << " test_acc=" << tm.test_acc
            << " best_epoch=" << tm.best_epoch << "\n";
    }
    double mean = 0.0;
    for (const double a : accs) mean += a;
    mean /= static_cast<double>(accs.size());
    double var = 0.0;
    for (const double a : accs) var += (a - mean) * (a - mean);
    const double sd = std::sqrt(var / static_cast<double>(accs.size()));
    nlohmann::json agg;
    agg["n_seeds"] = accs.size();
    agg["test_accs"] = accs;
    agg["mean_test_acc"] = mean;
    agg["std_test_acc"] = sd;
    write_text(out / "aggregate.json", agg.dump(2) + "\n");
    log << "train mean_test_acc=" << mean << " std=" << sd << "\n";
}

void cmd_eval(const ConfigMap& cfg, const fs::path& out, std::ostream& log) {
    const std::string& file = get_str(cfg, "architecture");
    if (file.empty()) throw ArgumentError("eval: 'architecture' is required");
    if (!get_str(cfg, "baseline").empty())
        throw ArgumentError("eval: 'baseline' is not accepted; pass an architecture file");
    auto [g, split] = load_with_split(cfg);
    const nas::Architecture arch = nas::Architecture::from_json(read_text(file));
    for (const std::uint64_t s : seed_list(cfg)) {
        engine::SearchConfig sc = to_search_config(cfg);
        sc.seed = s;
        engine::TrainedModel tm = engine::train_architecture(arch, g, split, sc);
        nlohmann::json j;
        j["seed"] = s;
        j["architecture"] = nlohmann::json::parse(arch.to_json());
        j["best_val_acc"] = tm.best_val_acc;
        j["test_acc"] = tm.test_acc;
        j["best_epoch"] = tm.best_epoch;
        j["epochs_run"] = tm.epochs_run;
        write_text(out / ("eval_" + std::to_string(s) + ".json"), j.dump(2) + "\n");
        log << "eval seed=" << s << " val_acc=" << tm.best_val_acc
            << " test_acc=" << tm.test_acc << "\n";
    }
}

void cmd_mad(const ConfigMap& cfg, const fs::path& out, std::ostream& log) {
    auto [g, split] = load_with_split(cfg);
    const std::vector<int> depths = parse_int_list(get_str(cfg, "depths"), "depths");
    const std::string& method = get_str(cfg, "method");
    if (method != "stack" && method != "llc")
        throw ArgumentError("mad: unknown method '" + method + "' (stack or llc)");
    for (const std::uint64_t s : seed_list(cfg)) {
        engine::SearchConfig sc = to_search_config(cfg);
        sc.seed = s;
        diag::DepthMethod at_depth;
        if (method == "stack") {
            at_depth = [sc](int depth) {
                engine::SearchConfig c = sc;
                c.n_gnn_blocks = depth;
                return engine::build_baseline("stack" + std::to_string(depth), c);
            };
        } else {
            at_depth = [sc, &g, &split](int depth) {
                engine::SearchConfig c = sc;
                c.n_gnn_blocks = depth;
                return engine::run_search(g, split, c).first;
            };
        }
        const diag::MadReport report = diag::mad_depth_sweep(g, split, at_depth, depths, sc);
        write_text(out / ("mad_" + std::to_string(s) + ".json"), report.to_json());
        write_text(out / ("mad_" + std::to_string(s) + ".csv"), report.to_csv());
        for (const auto& row : report.rows)
            log << "mad seed=" << s << " depth=" << row.depth << " acc=" << row.accuracy
                << " mad=" << row.mad << "\n";
    }
}

void cmd_oracle(const ConfigMap& cfg, const fs::path& out, std::ostream& log) {
    auto [g, split] = load_with_split(cfg);
    const std::vector<nas::Fusion> subset = parse_fusion_list(get_str(cfg, "fusion_subset"));
    const engine::SearchConfig sc = to_search_config(cfg);
    const diag::OracleResult result = diag::oracle_search(spec_for(cfg, g), g, split, sc, subset);
    write_text(out / "oracle.json", result.to_json());
    const auto& best = result.ranking.front();
    log << "oracle architectures=" << result.total << " best_val_acc=" << best.val_acc
        << " best_test_acc=" << best.test_acc << " best_key="
        << best.architecture.canonical_key() << "\n";
}

void cmd_gen_data(const ConfigMap& cfg, const fs::path& out, std::ostream& log) {
    const std::uint64_t seed = get_u64(cfg, "seed");
    const data::Graph g = data::generate_sbm(
        static_cast<int>(get_int(cfg, "communities")),
        static_cast<int>(get_int(cfg, "nodes_per_community")), get_real(cfg, "p_in"),
        get_real(cfg, "p_out"), static_cast<int>(get_int(cfg, "feature_dim")),
        get_real(cfg, "feature_noise"), ad::Rng::substream_seed(seed, "data"));
    const data::DataSplit split =
        data::split_nodes(g, get_real(cfg, "train_ratio"), get_real(cfg, "val_ratio"),
                          get_real(cfg, "test_ratio"), ad::Rng::substream_seed(seed, "split"));
    data::save_dataset(g, out, &split);
    log << "gen-data nodes=" << g.n_nodes << " edges=" << g.edges.size()
        << " classes=" << g.n_classes << " fingerprint=" << fingerprint_dataset(out) << "\n";
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"search", "train",  "eval",
                                                   "mad",    "oracle", "gen-data"};
    return names;
}

int run_command(const std::string& command, const ConfigMap& cfg, std::ostream& log) {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end())
        throw ArgumentError("unknown command '" + command + "'");

    const std::string& out_str = get_str(cfg, "out");
    if (out_str.empty()) throw ArgumentError("config: 'out' must not be empty");
    const fs::path out(out_str);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw IoError("cannot create output directory " + out.string());

    RunManifest manifest;
    manifest.command = command;
    manifest.config = cfg;
    manifest.seeds = seed_list(cfg);
    manifest.output_dir = out_str;
    if (command == "gen-data") {
        manifest.dataset_fingerprint = "none";
    } else {
        const std::string& dir = get_str(cfg, "data");
        if (dir.empty())
            throw ArgumentError("config: 'data' must point at a dataset directory");
        manifest.dataset_fingerprint = fingerprint_dataset(dir);
    }
    write_text(out / "manifest.json", manifest.to_json());

    if (command == "search")
        cmd_search(cfg, out, log);
    else if (command == "train")
        cmd_train(cfg, out, log);
    else if (command == "eval")
        cmd_eval(cfg, out, log);
    else if (command == "mad")
        cmd_mad(cfg, out, log);
    else if (command == "oracle")
        cmd_oracle(cfg, out, log);
    else
        cmd_gen_data(cfg, out, log);
    return 0;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return 2;
    if (dynamic_cast<const NumericError*>(&e)) return 3;
    return 1;
}

}  // namespace connsearch::cli
