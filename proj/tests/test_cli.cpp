#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "homokin/io.hpp"

namespace fs = std::filesystem;
using homokin::io::Json;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HOMOKIN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

struct TmpDir {
  fs::path path;
  explicit TmpDir(const std::string& name) : path(fs::path("cli_test_tmp") / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TmpDir() { fs::remove_all(path); }
  std::string prefix(const std::string& stem) const { return (path / stem).string(); }
};

}  // namespace

TEST_CASE("cli: identical configs give byte-identical tables and reports") {
  TmpDir tmp("repro");
  const std::string out = tmp.prefix("run");
  REQUIRE(run_cli("phi --n 8 --output " + out) == 0);
  const std::string csv1 = slurp(out + ".csv");
  const std::string json1 = slurp(out + ".json");
  const Json man1 = Json::parse(slurp(out + ".manifest.json"));
  REQUIRE(run_cli("phi --n 8 --output " + out) == 0);
  CHECK(slurp(out + ".csv") == csv1);
  CHECK(slurp(out + ".json") == json1);
  const Json man2 = Json::parse(slurp(out + ".manifest.json"));
  CHECK(man1["config_hash"] == man2["config_hash"]);
  CHECK(man1["version"] == man2["version"]);
}

TEST_CASE("cli: unknown config keys fail before any file is written") {
  TmpDir tmp("badkey");
  const std::string cfg = tmp.prefix("cfg.json");
  std::ofstream(cfg) << "{\"n\": 4, \"bogus\": 1}\n";
  const std::string out = tmp.prefix("out");
  CHECK(run_cli("phi --config " + cfg + " --output " + out) == 1);
  CHECK_FALSE(fs::exists(out + ".csv"));
  CHECK_FALSE(fs::exists(out + ".json"));
  CHECK_FALSE(fs::exists(out + ".manifest.json"));
}

TEST_CASE("cli: flags override config-file values") {
  TmpDir tmp("override");
  const std::string cfg = tmp.prefix("cfg.json");
  std::ofstream(cfg) << "{\"n\": 4, \"emin\": 1.5, \"emax\": 3.0}\n";
  const std::string out = tmp.prefix("out");
  REQUIRE(run_cli("phi --config " + cfg + " --n 6 --output " + out) == 0);
  const auto rows = csv_rows(out + ".csv");
  REQUIRE(rows.size() == 7);  // header + 6 grid points
  CHECK(rows[1][0].substr(0, 3) == "1.5");
  // effective velocity increases along the energy grid
  double prev = 0.0;
  for (size_t i = 1; i < rows.size(); ++i) {
    const double v = std::stod(rows[i][1]);
    CHECK(v > prev);
    prev = v;
  }
  const Json report = Json::parse(slurp(out + ".json"));
  CHECK(report["config"]["n"] == 6);
  CHECK(report["config"]["emin"] == 1.5);
}

TEST_CASE("cli: a run whose every task fails numerically exits 2") {
  TmpDir tmp("allfail");
  const std::string out = tmp.prefix("out");
  // the whole grid sits inside the critical band around the ceiling
  CHECK(run_cli("phi --emin 0.9995 --emax 1.0005 --n 3 --output " + out) == 2);
  const Json report = Json::parse(slurp(out + ".json"));
  REQUIRE(report["task_errors"].size() == 3);
  for (const auto& e : report["task_errors"]) CHECK(e["kind"] == "critical-energy");
  // partial failure still exits 0 and keeps the good rows
  const std::string out2 = tmp.prefix("partial");
  CHECK(run_cli("phi --emin 0.9995 --emax 2.0 --n 5 --output " + out2) == 0);
  const Json rep2 = Json::parse(slurp(out2 + ".json"));
  CHECK(rep2["task_errors"].size() > 0);
  CHECK(csv_rows(out2 + ".csv").size() > 1);
}

TEST_CASE("cli: converge ladder shows second-order drift decay") {
  TmpDir tmp("conv");
  const std::string out = tmp.prefix("out");
  REQUIRE(run_cli("converge --T 100 --levels 3 --output " + out) == 0);
  const auto rows = csv_rows(out + ".csv");
  REQUIRE(rows.size() == 4);
  for (size_t i = 2; i < rows.size(); ++i) {
    const double ratio = std::stod(rows[i][2]);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("cli: missing subcommand or bad flags fail with exit 1") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("phi --no-such-flag 3") == 1);
  CHECK(run_cli("phi --n not_a_number") == 1);
}
