// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "connsearch/cli/config.hpp"

namespace connsearch::cli {

// Written into the output directory before any computation starts; a run is
// reproducible from this file alone (plus the fingerprinted dataset).
struct RunManifest {
    std::string command;
    ConfigMap config;  // fully resolved
    std::string dataset_fingerprint;
    std::vector<std::uint64_t> seeds;
    std::string output_dir;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
    static RunManifest load(const std::filesystem::path& path);
};

// FNV-1a over the dataset files' names and bytes, in fixed order.
std::string fingerprint_dataset(const std::filesystem::path& dir);

}  // namespace connsearch::cli
