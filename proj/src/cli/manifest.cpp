// Copyright (c) 2026 connsearch contributors
// SPDX-License-Identifier: Apache-2.0
#include "connsearch/cli/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "connsearch/errors.hpp"

#include "json.hpp"

namespace connsearch::cli {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv1a_bytes(std::uint64_t& h, const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= kFnvPrime;
    }
}

void fnv1a_file(std::uint64_t& h, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("fingerprint: cannot open " + path.string());
    const std::string name = path.filename().string();
    fnv1a_bytes(h, name.data(), name.size());
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        fnv1a_bytes(h, buf, static_cast<std::size_t>(in.gcount()));
}

}  // namespace

std::string fingerprint_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("fingerprint: not a directory: " + dir.string());
    std::uint64_t h = kFnvOffset;
    fnv1a_file(h, dir / "edges.tsv");
    fnv1a_file(h, dir / "features.csv");
    fnv1a_file(h, dir / "labels.csv");
    if (std::filesystem::exists(dir / "splits.json")) fnv1a_file(h, dir / "splits.json");
    std::ostringstream out;
    out << "fnv1a:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config"] = nlohmann::json::object();
    for (const auto& [k, v] : config) j["config"][k] = v;
    j["dataset_fingerprint"] = dataset_fingerprint;
    j["seeds"] = seeds;
    j["output_dir"] = output_dir;
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: invalid json: ") + e.what());
    }
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        for (const auto& [k, v] : j.at("config").items())
            m.config[k] = v.get<std::string>();
        m.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
        m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        m.output_dir = j.at("output_dir").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: missing or mistyped field: ") + e.what());
    }
    return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("manifest: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace connsearch::cli
