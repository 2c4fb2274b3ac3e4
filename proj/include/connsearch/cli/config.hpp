// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "connsearch/engine/search.hpp"

namespace connsearch::cli {

// Flat string-to-string configuration; values stay textual until a command
// asks for them with a typed getter.
using ConfigMap = std::map<std::string, std::string>;

// Every supported key, materialized with its default value. Commands read
// only the keys they need.
const ConfigMap& default_config();

// `key = value` lines; '#' starts a comment, blank lines are skipped.
// Unknown or repeated keys are rejected.
ConfigMap parse_config_file(const std::filesystem::path& path);

// Three-layer precedence: defaults, then file values, then flag overrides.
ConfigMap resolve_config(const ConfigMap& file_values, const ConfigMap& overrides);

// Same override validation, but on top of an existing resolved map (the
// manifest-rerun path).
ConfigMap apply_overrides(const ConfigMap& base, const ConfigMap& overrides);

std::int64_t get_int(const ConfigMap& cfg, const std::string& key);
std::uint64_t get_u64(const ConfigMap& cfg, const std::string& key);
double get_real(const ConfigMap& cfg, const std::string& key);
const std::string& get_str(const ConfigMap& cfg, const std::string& key);

std::vector<int> parse_int_list(const std::string& text, const std::string& key);
std::vector<nas::Fusion> parse_fusion_list(const std::string& text);

engine::SearchConfig to_search_config(const ConfigMap& cfg);

}  // namespace connsearch::cli
