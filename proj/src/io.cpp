#include "homokin/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "homokin/errors.hpp"
#include "homokin/version.hpp"

namespace homokin::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const Json& config) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns.size())
    throw ValidationError("table row width does not match the header");
  rows.push_back(std::move(cells));
}

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

namespace {

std::ofstream open_out(const std::string& path) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open output file: " + path);
  return out;
}

}  // namespace

void write_csv(const std::string& path, const Json& config, const Table& table) {
  std::ofstream out = open_out(path);
  out << "# config " << config.dump() << "\n";
  for (size_t i = 0; i < table.columns.size(); ++i)
    out << (i ? "," : "") << table.columns[i];
  out << "\n";
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
  if (!out) throw ValidationError("failed writing: " + path);
}

void write_json(const std::string& path, const Json& payload) {
  std::ofstream out = open_out(path);
  out << payload.dump(2) << "\n";
  if (!out) throw ValidationError("failed writing: " + path);
}

void write_manifest(const std::string& path, const Json& config, double wall_ms) {
  Json m;
  m["config_hash"] = config_hash(config);
  m["version"] = kVersion;
  m["wall_ms"] = wall_ms;
  write_json(path, m);
}

}  // namespace homokin::io
