// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
//
// connsearch <command> [--config file] [--manifest file] [--key value ...]
//
// Flags override config-file values, which override built-in defaults.
// --manifest reruns a recorded run: its resolved config is the base layer
// and flags still win on top.
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "connsearch/cli/commands.hpp"
#include "connsearch/cli/config.hpp"
#include "connsearch/cli/manifest.hpp"
#include "connsearch/errors.hpp"

namespace cli = connsearch::cli;

namespace {

struct SubState {
    std::string config_path;
    std::string manifest_path;
    cli::ConfigMap overrides;
};

const std::map<std::string, std::string>& descriptions() {
    static const std::map<std::string, std::string> d = {
        {"search", "learn block connections and fusions, then derive an architecture"},
        {"train", "train a discrete architecture (file or named baseline) from scratch"},
        {"eval", "retrain an architecture file and report validation/test accuracy"},
        {"mad", "depth sweep of test accuracy and representation smoothness"},
        {"oracle", "enumerate and train every architecture in a small space"},
        {"gen-data", "generate a synthetic SBM node-classification dataset"},
    };
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"differentiable connection search for deep GNNs"};
    app.require_subcommand(1);

    std::map<std::string, SubState> state;
    for (const std::string& name : cli::command_names()) {
        CLI::App* sub = app.add_subcommand(name, descriptions().at(name));
        SubState& st = state[name];
        sub->add_option("--config", st.config_path, "key = value config file");
        sub->add_option("--manifest", st.manifest_path, "rerun from a recorded manifest.json");
        for (const auto& [key, def] : cli::default_config()) {
            sub->add_option_function<std::string>(
                "--" + key,
                [&st, k = key](const std::string& v) { st.overrides[k] = v; },
                "default: " + (def.empty() ? "(empty)" : def));
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::string command;
    for (const std::string& name : cli::command_names())
        if (app.got_subcommand(name)) command = name;
    const SubState& st = state.at(command);

    try {
        cli::ConfigMap resolved;
        if (!st.manifest_path.empty()) {
            if (!st.config_path.empty())
                throw connsearch::ArgumentError("--config and --manifest are mutually exclusive");
            const cli::RunManifest m = cli::RunManifest::load(st.manifest_path);
            if (m.command != command)
                throw connsearch::ArgumentError("manifest records command '" + m.command +
                                                "', not '" + command + "'");
            resolved = cli::apply_overrides(m.config, st.overrides);
        } else {
            const cli::ConfigMap file_values =
                st.config_path.empty() ? cli::ConfigMap{} : cli::parse_config_file(st.config_path);
            resolved = cli::resolve_config(file_values, st.overrides);
        }
        return cli::run_command(command, resolved);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::exit_code_for(e);
    }
}
