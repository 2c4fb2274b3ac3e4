// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "connsearch/cli/config.hpp"

namespace connsearch::cli {

const std::vector<std::string>& command_names();  // search train eval mad oracle gen-data

// Runs one subcommand against a fully resolved config: writes the run
// manifest into the output directory first, then the command's artifacts.
// Returns 0; failures surface as exceptions.
int run_command(const std::string& command, const ConfigMap& cfg,
                std::ostream& log = std::cout);

// 1 config/argument, 2 dataset I/O, 3 numerics.
int exit_code_for(const std::exception& e);

}  // namespace connsearch::cli
