#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace homokin::io {

// Alphabetically ordered keys make every dump canonical, which is what keeps
// result files byte-identical across reruns of the same config.
using Json = nlohmann::json;

// Shortest exact decimal form of v (round-trips through %.17g).
std::string format_double(double v);

std::uint64_t fnv1a(std::string_view s);

// FNV-1a of the compact canonical dump, as fixed-width hex.
std::string config_hash(const Json& config);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
};

void ensure_parent_dir(const std::string& path);

// CSV layout: one "# config <compact json>" comment line, a header line, then
// the rows. Everything deterministic given the config.
void write_csv(const std::string& path, const Json& config, const Table& table);

// Pretty-printed JSON payload (the caller embeds the config inside it).
void write_json(const std::string& path, const Json& payload);

// Run metadata; the only file allowed to differ between identical runs.
void write_manifest(const std::string& path, const Json& config, double wall_ms);

}  // namespace homokin::io
