// Batch experiment runner: every library module behind one subcommand-style
// binary with reproducible JSON configs, flag overrides, and CSV/JSON outputs.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "homokin/closedform.hpp"
#include "homokin/config.hpp"
#include "homokin/dynamics.hpp"
#include "homokin/ergodic.hpp"
#include "homokin/errors.hpp"
#include "homokin/homogenize.hpp"
#include "homokin/io.hpp"
#include "homokin/observable.hpp"
#include "homokin/parallel.hpp"
#include "homokin/potential.hpp"
#include "homokin/resonance.hpp"
#include "homokin/version.hpp"

namespace {

using homokin::Error;
using homokin::NumericError;
using homokin::Observable;
using homokin::PhasePoint;
using homokin::Potential;
using homokin::ValidationError;
using Json = homokin::io::Json;
namespace cfg = homokin::cfg;
namespace io = homokin::io;
namespace par = homokin::par;

std::string fmt(double v) { return io::format_double(v); }

const char* numeric_error_kind(const NumericError& e) {
  if (dynamic_cast<const homokin::CriticalEnergyError*>(&e)) return "critical-energy";
  if (dynamic_cast<const homokin::QuadratureError*>(&e)) return "quadrature";
  if (dynamic_cast<const homokin::NoRunningRegion*>(&e)) return "no-running-region";
  if (dynamic_cast<const homokin::WellNotFound*>(&e)) return "well-not-found";
  if (dynamic_cast<const homokin::EnergyBelowCritical*>(&e)) return "energy-below-critical";
  if (dynamic_cast<const homokin::KinkError*>(&e)) return "kink";
  if (dynamic_cast<const homokin::ProjectionUnavailable*>(&e)) return "projection-unavailable";
  if (dynamic_cast<const homokin::ResonantState*>(&e)) return "resonant";
  return "numeric";
}

// Collects per-task numeric failures; the run continues past them.
struct TaskLog {
  Json errors = Json::array();
  long total = 0;
  long failed = 0;

  void record(const std::string& task, const NumericError& e) {
    ++failed;
    errors.push_back({{"task", task}, {"kind", numeric_error_kind(e)}, {"message", e.what()}});
  }
  int exit_code() const { return total > 0 && failed == total ? 2 : 0; }
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

Json load_config_file(const std::string& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file: " + path);
  Json j = Json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ValidationError("config file is not valid JSON: " + path);
  if (!j.is_object()) throw ValidationError("config file must hold a JSON object: " + path);
  return j;
}

int resolve_jobs(long jobs) {
  if (jobs < 0) throw ValidationError("jobs: must be >= 0");
  if (jobs == 0) return par::hardware_jobs();
  return static_cast<int>(jobs);
}

par::Exec exec_mode(int jobs) {
  if (jobs > 1) par::set_jobs(jobs);
  return jobs > 1 ? par::Exec::Parallel : par::Exec::Serial;
}

void write_outputs(const std::string& prefix, const Json& resolved, const io::Table& table,
                   Json payload, const TaskLog& log, const Timer& timer) {
  payload["config"] = resolved;
  payload["task_errors"] = log.errors;
  io::write_csv(prefix + ".csv", resolved, table);
  io::write_json(prefix + ".json", payload);
  io::write_manifest(prefix + ".manifest.json", resolved, timer.ms());
}

std::vector<double> energy_grid(double lo, double hi, long n) {
  if (n < 1) throw ValidationError("n: need at least one grid point");
  if (!(hi >= lo)) throw ValidationError("grid bounds must satisfy max >= min");
  std::vector<double> g;
  for (long i = 0; i < n; ++i)
    g.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

// Realization seeds for kinds that carry randomness; empty when the potential
// is deterministic. Validated against the potential kind.
std::vector<std::uint64_t> realization_seeds(const Json& raw, const Json& pot_spec) {
  std::vector<std::uint64_t> seeds;
  if (raw.contains("seeds")) {
    const Json& arr = raw["seeds"];
    if (!arr.is_array() || arr.empty())
      throw ValidationError("seeds: expected a nonempty array of integers");
    for (const Json& v : arr) {
      if (!v.is_number_integer()) throw ValidationError("seeds: expected integers");
      seeds.push_back(v.get<std::uint64_t>());
    }
    if (cfg::str_or(pot_spec, "potential", "kind", "") != "random-phase")
      throw ValidationError("seeds: realization sweeps only apply to random-phase potentials");
  }
  return seeds;
}

// ---------------------------------------------------------------- flow ----

int run_flow(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "y0", "xi0", "T", "h", "stride", "output"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  Json resolved;
  resolved["potential"] = pot;
  std::vector<double> y0{0.0}, xi0{2.0};
  if (raw.contains("y0")) y0 = cfg::num_list(raw, "config", "y0");
  if (raw.contains("xi0")) xi0 = cfg::num_list(raw, "config", "xi0");
  if (y0.size() != xi0.size()) throw ValidationError("y0/xi0: lengths differ");
  const double T = cfg::num_or(raw, "config", "T", 10.0);
  const double h = cfg::num_or(raw, "config", "h", 1e-3);
  const long stride = cfg::integer_or(raw, "config", "stride", 100);
  const std::string output = cfg::str_or(raw, "config", "output", "out/flow");
  resolved["y0"] = y0;
  resolved["xi0"] = xi0;
  resolved["T"] = T;
  resolved["h"] = h;
  resolved["stride"] = stride;
  resolved["output"] = output;

  const Potential u = cfg::potential_from_json(pot, "potential");
  const PhasePoint start{y0, xi0};

  Timer timer;
  TaskLog log;
  log.total = 1;
  io::Table table;
  table.columns = {"t"};
  for (size_t i = 0; i < y0.size(); ++i) table.columns.push_back("y" + std::to_string(i));
  for (size_t i = 0; i < y0.size(); ++i) table.columns.push_back("xi" + std::to_string(i));
  table.columns.push_back("energy");

  Json payload;
  try {
    const homokin::Trajectory tr = homokin::integrate_time(u, start, T, h, stride);
    for (size_t k = 0; k < tr.times.size(); ++k) {
      std::vector<std::string> row{fmt(tr.times[k])};
      for (double v : tr.states[k].y) row.push_back(fmt(v));
      for (double v : tr.states[k].xi) row.push_back(fmt(v));
      row.push_back(fmt(homokin::hamiltonian(u, tr.states[k])));
      table.add_row(std::move(row));
    }
    payload["energy0"] = tr.energy0;
    payload["max_energy_drift"] = tr.max_energy_drift;
    payload["orbit_class"] = homokin::orbit_class_name(homokin::classify(u, start));
    payload["stability_limit"] = homokin::stability_limit(u);
  } catch (const NumericError& e) {
    log.record("flow", e);
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// -------------------------------------------------------------- xsharp ----

int run_xsharp(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "y0", "xi0", "T", "h", "seeds", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const double y0 = cfg::num_or(raw, "config", "y0", 0.0);
  const double xi0 = cfg::num_or(raw, "config", "xi0", 2.0);
  const double T = cfg::num_or(raw, "config", "T", 1e4);
  const double h = cfg::num_or(raw, "config", "h", 1e-3);
  const std::string output = cfg::str_or(raw, "config", "output", "out/xsharp");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));
  const std::vector<std::uint64_t> seeds = realization_seeds(raw, pot);

  Json resolved;
  resolved["potential"] = pot;
  resolved["y0"] = y0;
  resolved["xi0"] = xi0;
  resolved["T"] = T;
  resolved["h"] = h;
  resolved["output"] = output;
  resolved["jobs"] = jobs;
  if (!seeds.empty()) resolved["seeds"] = seeds;

  Timer timer;
  TaskLog log;
  io::Table table;
  table.columns = {"seed", "endpoint", "quadrature", "closed", "abs_diff", "tail_variation"};
  Json payload;
  payload["window_means"] = Json::array();

  struct Item {
    std::optional<std::uint64_t> seed;
  };
  std::vector<Item> items;
  if (seeds.empty())
    items.push_back({std::nullopt});
  else
    for (std::uint64_t s : seeds) items.push_back({s});
  log.total = static_cast<long>(items.size());

  for (const Item& item : items) {
    const std::string task =
        item.seed ? "seed=" + std::to_string(*item.seed) : "single";
    try {
      const Potential u = cfg::potential_from_json(pot, "potential", item.seed);
      const homokin::ErgodicEstimate est = homokin::xsharp_empirical(u, {y0, xi0}, T, h);
      const double quad = homokin::xsharp_quadrature(u, {y0, xi0}, T, h);
      const double closed = homokin::xsharp_closed(u, {y0, xi0});
      table.add_row({item.seed ? std::to_string(*item.seed) : "", fmt(est.value), fmt(quad),
                     fmt(closed), fmt(std::fabs(est.value - closed)), fmt(est.tail_variation)});
      payload["window_means"].push_back({{"task", task}, {"values", est.window_means}});
    } catch (const NumericError& e) {
      log.record(task, e);
    }
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ------------------------------------------------------------- project ----

int run_project(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "observable", "y0", "xi0", "T", "h", "ball_radius",
                             "ball_samples", "ball_seed", "seeds", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const Json obs = raw.value("observable", Json{{"kind", "sin_y"}, {"wavenumber", 1.0}});
  const Observable F = cfg::observable_from_json(obs, "observable");
  const double y0 = cfg::num_or(raw, "config", "y0", 0.0);
  const double xi0 = cfg::num_or(raw, "config", "xi0", 2.0);
  const double T = cfg::num_or(raw, "config", "T", 2e3);
  const double h = cfg::num_or(raw, "config", "h", 1e-3);
  const double ball_radius = cfg::num_or(raw, "config", "ball_radius", 0.0);
  const long ball_samples = cfg::integer_or(raw, "config", "ball_samples", 8);
  const long ball_seed = cfg::integer_or(raw, "config", "ball_seed", 0);
  const std::string output = cfg::str_or(raw, "config", "output", "out/project");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));
  const std::vector<std::uint64_t> seeds = realization_seeds(raw, pot);

  Json resolved;
  resolved["potential"] = pot;
  resolved["observable"] = obs;
  resolved["y0"] = y0;
  resolved["xi0"] = xi0;
  resolved["T"] = T;
  resolved["h"] = h;
  resolved["ball_radius"] = ball_radius;
  resolved["ball_samples"] = ball_samples;
  resolved["ball_seed"] = ball_seed;
  resolved["output"] = output;
  resolved["jobs"] = jobs;
  if (!seeds.empty()) resolved["seeds"] = seeds;

  Timer timer;
  TaskLog log;
  io::Table table;
  table.columns = {"seed", "empirical", "closed", "abs_diff", "tail_variation"};
  Json payload;

  std::vector<std::optional<std::uint64_t>> items;
  if (seeds.empty())
    items.push_back(std::nullopt);
  else
    for (std::uint64_t s : seeds) items.push_back(s);
  log.total = static_cast<long>(items.size());

  for (const auto& seed : items) {
    const std::string task = seed ? "seed=" + std::to_string(*seed) : "single";
    try {
      const Potential u = cfg::potential_from_json(pot, "potential", seed);
      const homokin::ErgodicEstimate est =
          homokin::project_empirical(u, F, {y0, xi0}, T, h, ball_radius,
                                     static_cast<int>(ball_samples),
                                     static_cast<std::uint64_t>(ball_seed));
      double closed = std::nan("");
      std::string closed_cell, diff_cell;
      try {
        closed = homokin::project_state(u, F, {y0, xi0});
        closed_cell = fmt(closed);
        diff_cell = fmt(std::fabs(est.value - closed));
      } catch (const NumericError& e) {
        payload["closed_form_errors"].push_back(
            {{"task", task}, {"kind", numeric_error_kind(e)}, {"message", e.what()}});
      }
      table.add_row({seed ? std::to_string(*seed) : "", fmt(est.value), closed_cell, diff_cell,
                     fmt(est.tail_variation)});
    } catch (const NumericError& e) {
      log.record(task, e);
    }
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ----------------------------------------------------------------- phi ----

int run_phi(const Json& raw) {
  cfg::require_allowed_keys(raw, "config", {"potential", "emin", "emax", "n", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const double emin = cfg::num_or(raw, "config", "emin", 1.1);
  const double emax = cfg::num_or(raw, "config", "emax", 10.0);
  const long n = cfg::integer_or(raw, "config", "n", 20);
  const std::string output = cfg::str_or(raw, "config", "output", "out/phi");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));

  Json resolved;
  resolved["potential"] = pot;
  resolved["emin"] = emin;
  resolved["emax"] = emax;
  resolved["n"] = n;
  resolved["output"] = output;
  resolved["jobs"] = jobs;

  const Potential u = cfg::potential_from_json(pot, "potential");
  const std::vector<double> grid = energy_grid(emin, emax, n);

  Timer timer;
  TaskLog log;
  log.total = n;
  std::vector<double> values(grid.size(), 0.0);
  std::vector<std::string> errs(grid.size());
  par::for_each_index(exec_mode(jobs), static_cast<long>(grid.size()), [&](long i) {
    try {
      values[i] = homokin::phi(u, grid[i]);
    } catch (const NumericError& e) {
      errs[i] = e.what();
    }
  });

  io::Table table;
  table.columns = {"E", "phi"};
  Json payload;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (errs[i].empty())
      table.add_row({fmt(grid[i]), fmt(values[i])});
    else
      log.record("E=" + fmt(grid[i]), homokin::CriticalEnergyError(errs[i]));
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ---------------------------------------------------------------- hbar ----

int run_hbar(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "pmin", "pmax", "n", "kink_tol", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const double pmin = cfg::num_or(raw, "config", "pmin", 0.0);
  const double pmax = cfg::num_or(raw, "config", "pmax", 3.0);
  const long n = cfg::integer_or(raw, "config", "n", 40);
  const double kink_tol = cfg::num_or(raw, "config", "kink_tol", 1e-9);
  const std::string output = cfg::str_or(raw, "config", "output", "out/hbar");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));

  Json resolved;
  resolved["potential"] = pot;
  resolved["pmin"] = pmin;
  resolved["pmax"] = pmax;
  resolved["n"] = n;
  resolved["kink_tol"] = kink_tol;
  resolved["output"] = output;
  resolved["jobs"] = jobs;

  const Potential u = cfg::potential_from_json(pot, "potential");
  const std::vector<double> grid = energy_grid(pmin, pmax, n);
  const double t0 = homokin::theta0(u);

  Timer timer;
  TaskLog log;
  log.total = n;
  struct Cell {
    double hbar = 0.0;
    std::string prime;  // empty on a kink
    std::string err;
  };
  std::vector<Cell> cells(grid.size());
  par::for_each_index(exec_mode(jobs), static_cast<long>(grid.size()), [&](long i) {
    try {
      cells[i].hbar = homokin::hbar(u, grid[i]);
      try {
        cells[i].prime = fmt(homokin::hbar_prime(u, grid[i], kink_tol));
      } catch (const homokin::KinkError&) {
        // at the kink the one-sided slopes disagree; leave the cell empty
      }
    } catch (const NumericError& e) {
      cells[i].err = e.what();
    }
  });

  io::Table table;
  table.columns = {"p", "hbar", "hbar_prime", "flat"};
  Json payload;
  payload["theta0"] = t0;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!cells[i].err.empty()) {
      log.record("p=" + fmt(grid[i]), homokin::NumericError(cells[i].err));
      continue;
    }
    table.add_row({fmt(grid[i]), fmt(cells[i].hbar), cells[i].prime,
                   std::fabs(grid[i]) <= t0 ? "1" : "0"});
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ------------------------------------------------------- project-closed ----

int run_project_closed(const Json& raw) {
  cfg::require_allowed_keys(
      raw, "config",
      {"potential", "observable", "emin", "emax", "n", "sigma", "y_anchor", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const Json obs = raw.value("observable", Json{{"kind", "sin_y"}, {"wavenumber", 1.0}});
  const Observable F = cfg::observable_from_json(obs, "observable");
  const double emin = cfg::num_or(raw, "config", "emin", 0.1);
  const double emax = cfg::num_or(raw, "config", "emax", 4.0);
  const long n = cfg::integer_or(raw, "config", "n", 20);
  const double sigma = cfg::num_or(raw, "config", "sigma", 1.0);
  const double y_anchor = cfg::num_or(raw, "config", "y_anchor", 0.0);
  const std::string output = cfg::str_or(raw, "config", "output", "out/project_closed");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));
  if (sigma != 1.0 && sigma != -1.0) throw ValidationError("sigma: must be +1 or -1");

  Json resolved;
  resolved["potential"] = pot;
  resolved["observable"] = obs;
  resolved["emin"] = emin;
  resolved["emax"] = emax;
  resolved["n"] = n;
  resolved["sigma"] = sigma;
  resolved["y_anchor"] = y_anchor;
  resolved["output"] = output;
  resolved["jobs"] = jobs;

  const Potential u = cfg::potential_from_json(pot, "potential");
  const std::vector<double> grid = energy_grid(emin, emax, n);
  const double band = homokin::critical_band(u);

  Timer timer;
  TaskLog log;
  log.total = n;
  struct Cell {
    std::string cls, value, err;
  };
  std::vector<Cell> cells(grid.size());
  par::for_each_index(exec_mode(jobs), static_cast<long>(grid.size()), [&](long i) {
    const double E = grid[i];
    try {
      if (E > u.u_max() + band) {
        cells[i].cls = "running";
        cells[i].value = fmt(homokin::project_running(u, F, E, sigma));
      } else if (E < u.u_max() - band) {
        cells[i].cls = "trapped";
        cells[i].value = fmt(homokin::project_trapped(u, F, E, y_anchor));
      } else {
        throw homokin::CriticalEnergyError("energy inside the critical band");
      }
    } catch (const NumericError& e) {
      cells[i].err = e.what();
    }
  });

  io::Table table;
  table.columns = {"E", "orbit_class", "value"};
  Json payload;
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!cells[i].err.empty()) {
      log.record("E=" + fmt(grid[i]), homokin::NumericError(cells[i].err));
      continue;
    }
    table.add_row({fmt(grid[i]), cells[i].cls, cells[i].value});
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ----------------------------------------------------------- corrector ----

int run_corrector(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "p", "n_points", "span", "seed", "output"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const double p = cfg::num_or(raw, "config", "p", 2.0);
  const long n_points = cfg::integer_or(raw, "config", "n_points", 256);
  const double span = cfg::num_or(raw, "config", "span", 40.5);
  const std::string output = cfg::str_or(raw, "config", "output", "out/corrector");
  std::optional<std::uint64_t> seed;
  if (raw.contains("seed"))
    seed = static_cast<std::uint64_t>(cfg::integer(raw, "config", "seed"));

  Json resolved;
  resolved["potential"] = pot;
  resolved["p"] = p;
  resolved["n_points"] = n_points;
  resolved["span"] = span;
  resolved["output"] = output;
  if (seed) resolved["seed"] = *seed;

  const Potential u = cfg::potential_from_json(pot, "potential", seed);

  Timer timer;
  TaskLog log;
  log.total = 1;
  io::Table table;
  table.columns = {"y", "w"};
  Json payload;
  try {
    const homokin::CorrectorProfile prof =
        homokin::corrector_profile(u, p, static_cast<int>(n_points), span);
    for (size_t i = 0; i < prof.y.size(); ++i) table.add_row({fmt(prof.y[i]), fmt(prof.w[i])});
    payload["sublinearity_ratio"] = prof.sublinearity_ratio;
    payload["span"] = prof.span;
  } catch (const NumericError& e) {
    log.record("corrector", e);
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ---------------------------------------------------------- homogenize ----

int run_homogenize(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "observable", "bump", "eps", "t", "T", "box",
                             "n_samples", "seeds", "cell_step", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const Json obs = raw.value("observable", Json{{"kind", "sin_y"}, {"wavenumber", 1.0}});
  const Json bump_spec =
      raw.value("bump", Json{{"center", 0.0}, {"radius", 1.0}, {"height", 1.0}});
  cfg::require_allowed_keys(bump_spec, "bump", {"center", "radius", "height"});
  const Json box_spec = raw.value(
      "box", Json{{"x_lo", -1.0}, {"x_hi", 1.0}, {"xi_lo", -2.0}, {"xi_hi", 2.0}});
  cfg::require_allowed_keys(box_spec, "box", {"x_lo", "x_hi", "xi_lo", "xi_hi"});

  std::vector<double> eps{0.1, 0.05, 0.025};
  if (raw.contains("eps")) eps = cfg::num_list(raw, "config", "eps");
  const double t = cfg::num_or(raw, "config", "t", 0.5);
  const double T = cfg::num_or(raw, "config", "T", 1.0);
  const long n_samples = cfg::integer_or(raw, "config", "n_samples", 200);
  const double cell_step = cfg::num_or(raw, "config", "cell_step", 1e-3);
  const std::string output = cfg::str_or(raw, "config", "output", "out/homogenize");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  if (raw.contains("seeds")) {
    seeds.clear();
    const Json& arr = raw["seeds"];
    if (!arr.is_array() || arr.empty()) throw ValidationError("seeds: expected a nonempty array");
    for (const Json& v : arr) {
      if (!v.is_number_integer()) throw ValidationError("seeds: expected integers");
      seeds.push_back(v.get<std::uint64_t>());
    }
  }

  Json resolved;
  resolved["potential"] = pot;
  resolved["observable"] = obs;
  resolved["bump"] = Json{{"center", cfg::num_or(bump_spec, "bump", "center", 0.0)},
                          {"radius", cfg::num_or(bump_spec, "bump", "radius", 1.0)},
                          {"height", cfg::num_or(bump_spec, "bump", "height", 1.0)}};
  resolved["box"] = Json{{"x_lo", cfg::num_or(box_spec, "box", "x_lo", -1.0)},
                         {"x_hi", cfg::num_or(box_spec, "box", "x_hi", 1.0)},
                         {"xi_lo", cfg::num_or(box_spec, "box", "xi_lo", -2.0)},
                         {"xi_hi", cfg::num_or(box_spec, "box", "xi_hi", 2.0)}};
  resolved["eps"] = eps;
  resolved["t"] = t;
  resolved["T"] = T;
  resolved["n_samples"] = n_samples;
  resolved["cell_step"] = cell_step;
  resolved["output"] = output;
  resolved["jobs"] = jobs;
  resolved["seeds"] = seeds;

  const Potential u = cfg::potential_from_json(pot, "potential");
  const homokin::InitialData f0{
      homokin::MacroFunction::bump(resolved["bump"]["center"].get<double>(),
                                   resolved["bump"]["radius"].get<double>(),
                                   resolved["bump"]["height"].get<double>()),
      cfg::observable_from_json(obs, "observable")};
  const homokin::Box box{resolved["box"]["x_lo"].get<double>(),
                         resolved["box"]["x_hi"].get<double>(),
                         resolved["box"]["xi_lo"].get<double>(),
                         resolved["box"]["xi_hi"].get<double>()};
  const par::Exec mode = exec_mode(jobs);

  Timer timer;
  TaskLog log;
  log.total = static_cast<long>(seeds.size() * eps.size());
  io::Table table;
  table.columns = {"eps",          "seed",      "residual",  "residual_stderr",
                   "weak_avg",     "weak_stderr", "n_samples", "n_skipped"};
  Json payload;
  for (std::uint64_t seed : seeds) {
    for (double e : eps) {
      const std::string task = "eps=" + fmt(e) + " seed=" + std::to_string(seed);
      try {
        const homokin::SampledNorm res =
            homokin::residual_norm(u, f0, e, t, box, n_samples, seed, mode, cell_step);
        const homokin::SampledNorm wk =
            homokin::weak_time_average_g(u, f0, e, T, box, n_samples, seed, mode, cell_step);
        table.add_row({fmt(e), std::to_string(seed), fmt(res.value), fmt(res.std_error),
                       fmt(wk.value), fmt(wk.std_error), std::to_string(n_samples),
                       std::to_string(res.n_skipped + wk.n_skipped)});
      } catch (const NumericError& err) {
        log.record(task, err);
      }
    }
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ----------------------------------------------------------- resonance ----

int run_resonance(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potentials", "observables", "y0", "xi0", "K", "tol",
                             "fourier_order", "fourier_samples", "T_avg", "h", "output"});
  Json pots = Json::array({Json("harmonic-well"), Json("harmonic-well")});
  if (raw.contains("potentials")) pots = raw["potentials"];
  if (!pots.is_array() || pots.size() < 2)
    throw ValidationError("potentials: expected an array of at least two axis potentials");
  Json obs_spec = Json::array({Json{{"kind", "coordinate"}}, Json{{"kind", "coordinate"}}});
  if (raw.contains("observables")) obs_spec = raw["observables"];
  if (!obs_spec.is_array() || obs_spec.size() != pots.size())
    throw ValidationError("observables: need exactly one observable per axis");

  std::vector<double> y0(pots.size(), 0.0), xi0;
  xi0 = {std::sqrt(0.08), std::sqrt(0.12)};
  xi0.resize(pots.size(), 0.3);
  if (raw.contains("y0")) y0 = cfg::num_list(raw, "config", "y0");
  if (raw.contains("xi0")) xi0 = cfg::num_list(raw, "config", "xi0");
  if (y0.size() != pots.size() || xi0.size() != pots.size())
    throw ValidationError("y0/xi0: need one entry per axis");
  const long K = cfg::integer_or(raw, "config", "K", 50);
  const double tol = cfg::num_or(raw, "config", "tol", 1e-9);
  const long order = cfg::integer_or(raw, "config", "fourier_order", 8);
  const long fsamples = cfg::integer_or(raw, "config", "fourier_samples", 4096);
  const double T_avg = cfg::num_or(raw, "config", "T_avg", 1000.0);
  const double h = cfg::num_or(raw, "config", "h", 1e-3);
  const std::string output = cfg::str_or(raw, "config", "output", "out/resonance");

  Json resolved;
  Json pots_resolved = Json::array();
  for (size_t i = 0; i < pots.size(); ++i)
    pots_resolved.push_back(
        cfg::expand_potential_preset(pots[i], "potentials[" + std::to_string(i) + "]"));
  resolved["potentials"] = pots_resolved;
  resolved["observables"] = obs_spec;
  resolved["y0"] = y0;
  resolved["xi0"] = xi0;
  resolved["K"] = K;
  resolved["tol"] = tol;
  resolved["fourier_order"] = order;
  resolved["fourier_samples"] = fsamples;
  resolved["T_avg"] = T_avg;
  resolved["h"] = h;
  resolved["output"] = output;

  std::vector<Potential> axes;
  std::vector<Observable> fs;
  for (size_t i = 0; i < pots.size(); ++i) {
    axes.push_back(cfg::potential_from_json(pots_resolved[i],
                                            "potentials[" + std::to_string(i) + "]"));
    fs.push_back(
        cfg::observable_from_json(obs_spec[i], "observables[" + std::to_string(i) + "]"));
  }
  const PhasePoint state{y0, xi0};

  Timer timer;
  TaskLog log;
  log.total = 1;
  io::Table table;
  table.columns = {"axis", "theta", "energy", "projection"};
  Json payload;
  try {
    const homokin::PeriodVector pv = homokin::axis_periods(axes, state);
    const bool ok = homokin::noncommensurate(pv, static_cast<int>(K), tol);
    payload["thetas"] = pv.thetas;
    payload["energies"] = pv.energies;
    payload["noncommensurate"] = ok;
    payload["K"] = K;
    payload["tol"] = tol;

    std::vector<double> projections;
    double product = 1.0;
    for (size_t i = 0; i < axes.size(); ++i) {
      const double pi = homokin::project_state(axes[i], fs[i], {y0[i], xi0[i]});
      projections.push_back(pi);
      product *= pi;
      table.add_row({std::to_string(i), fmt(pv.thetas[i]), fmt(pv.energies[i]), fmt(pi)});
    }
    payload["axis_projections"] = projections;
    payload["product_of_projections"] = product;

    const Potential joint = Potential::separable(axes);
    const homokin::ErgodicEstimate joint_avg =
        homokin::time_average(joint, Observable::axis_product(fs), state, T_avg, h);
    payload["joint_average"] = joint_avg.value;
    payload["joint_tail_variation"] = joint_avg.tail_variation;

    if (ok) {
      payload["product_law_gap"] = std::fabs(joint_avg.value - product);
    } else {
      double spread = 0.0;
      for (double th : pv.thetas) spread = std::max(spread, std::fabs(th - pv.thetas[0]));
      if (spread <= 1e-6 * pv.thetas[0]) {
        const double T0 = pv.thetas[0];
        std::vector<homokin::FourierSeries> coeffs;
        for (size_t i = 0; i < axes.size(); ++i)
          coeffs.push_back(homokin::orbit_fourier_coeffs(axes[i], fs[i], {y0[i], xi0[i]}, T0,
                                                         static_cast<int>(order),
                                                         static_cast<int>(fsamples)));
        const homokin::ResonantSum sum = homokin::resonant_limit(coeffs, T0);
        payload["resonant_limit"] = sum.value;
        payload["truncation_bound"] = sum.truncation_bound;
        payload["limit_vs_joint_gap"] = std::fabs(sum.value - joint_avg.value);
      } else {
        payload["resonant_limit_note"] =
            "periods are commensurate but not equal; constrained Fourier sum needs a shared "
            "period";
      }
    }
  } catch (const NumericError& e) {
    log.record("resonance", e);
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ------------------------------------------------------------ converge ----

int run_converge(const Json& raw) {
  cfg::require_allowed_keys(raw, "config",
                            {"potential", "y0", "xi0", "T", "h0", "levels", "output", "jobs"});
  const Json pot = cfg::expand_potential_preset(raw.value("potential", Json("cos-well")),
                                                "potential");
  const double y0 = cfg::num_or(raw, "config", "y0", 0.0);
  const double xi0 = cfg::num_or(raw, "config", "xi0", 2.0);
  const double T = cfg::num_or(raw, "config", "T", 1e3);
  const double h0 = cfg::num_or(raw, "config", "h0", 4e-3);
  const long levels = cfg::integer_or(raw, "config", "levels", 4);
  const std::string output = cfg::str_or(raw, "config", "output", "out/converge");
  const int jobs = resolve_jobs(cfg::integer_or(raw, "config", "jobs", 1));
  if (levels < 1) throw ValidationError("levels: need at least one");

  Json resolved;
  resolved["potential"] = pot;
  resolved["y0"] = y0;
  resolved["xi0"] = xi0;
  resolved["T"] = T;
  resolved["h0"] = h0;
  resolved["levels"] = levels;
  resolved["output"] = output;
  resolved["jobs"] = jobs;

  const Potential u = cfg::potential_from_json(pot, "potential");

  Timer timer;
  TaskLog log;
  log.total = levels;
  std::vector<double> drifts(levels, std::nan(""));
  std::vector<std::string> errs(levels);
  par::for_each_index(exec_mode(jobs), levels, [&](long k) {
    const double h = h0 / static_cast<double>(1L << k);
    try {
      PhasePoint s{y0, xi0};
      drifts[k] = homokin::walk(u, s, h, homokin::steps_for(T, h),
                                [](double, const PhasePoint&) {});
    } catch (const NumericError& e) {
      errs[k] = e.what();
    }
  });

  io::Table table;
  table.columns = {"h", "max_drift", "ratio_to_previous"};
  Json payload;
  payload["orders"] = Json::array();
  for (long k = 0; k < levels; ++k) {
    const double h = h0 / static_cast<double>(1L << k);
    if (!errs[k].empty()) {
      log.record("h=" + fmt(h), homokin::NumericError(errs[k]));
      continue;
    }
    std::string ratio;
    if (k > 0 && errs[k - 1].empty() && drifts[k] > 0.0) {
      ratio = fmt(drifts[k - 1] / drifts[k]);
      payload["orders"].push_back(std::log2(drifts[k - 1] / drifts[k]));
    }
    table.add_row({fmt(h), fmt(drifts[k]), ratio});
  }
  write_outputs(output, resolved, table, std::move(payload), log, timer);
  return log.exit_code();
}

// ------------------------------------------------------------- wiring ----

struct SubcommandArgs {
  std::string config_path;
  std::string potential_preset;
  std::vector<double> y0, xi0, eps_list, box_list, bump_list;
  std::vector<long long> seeds;
  double T = 0, h = 0, t = 0, emin = 0, emax = 0, pmin = 0, pmax = 0, h0 = 0, p = 0, span = 0,
         ball_radius = 0, K_tol = 0, T_avg = 0, xi0_s = 0, y0_s = 0;
  long n = 0, stride = 0, jobs = 0, n_samples = 0, levels = 0, n_points = 0, K = 0,
       fourier_order = 0, ball_samples = 0;
  long long seed = 0, ball_seed = 0;
  std::string output;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oscillatory transport homogenization toolbox"};
  app.require_subcommand(1);

  // One arg pack per subcommand; an option writes its config key only when
  // the flag was actually given, so file values survive unless overridden.
  struct Pending {
    Json raw = Json::object();
    std::vector<std::function<void(Json&)>> overrides;
    std::string config_path;
  };
  auto wire = [&](CLI::App* sub, Pending& p) {
    sub->add_option("--config", p.config_path, "JSON config file");
  };
  auto overlay = [](Pending& p) {
    Json raw = load_config_file(p.config_path);
    for (const auto& apply : p.overrides) apply(raw);
    return raw;
  };

  // helper macro-free binding: capture by pointer into Pending.overrides
  auto bind_double = [](CLI::App* sub, Pending& p, const char* flag, const char* key,
                        const char* help) {
    auto v = std::make_shared<double>();
    CLI::Option* o = sub->add_option(flag, *v, help);
    p.overrides.push_back([v, o, key = std::string(key)](Json& j) {
      if (o->count() > 0) j[key] = *v;
    });
  };
  auto bind_int = [](CLI::App* sub, Pending& p, const char* flag, const char* key,
                     const char* help, const char* env = nullptr) {
    auto v = std::make_shared<long>();
    CLI::Option* o = sub->add_option(flag, *v, help);
    if (env) o->envname(env);
    p.overrides.push_back([v, o, key = std::string(key)](Json& j) {
      if (o->count() > 0) j[key] = *v;
    });
  };
  auto bind_string = [](CLI::App* sub, Pending& p, const char* flag, const char* key,
                        const char* help) {
    auto v = std::make_shared<std::string>();
    CLI::Option* o = sub->add_option(flag, *v, help);
    p.overrides.push_back([v, o, key = std::string(key)](Json& j) {
      if (o->count() > 0) j[key] = *v;
    });
  };
  auto bind_dlist = [](CLI::App* sub, Pending& p, const char* flag, const char* key,
                       const char* help) {
    auto v = std::make_shared<std::vector<double>>();
    CLI::Option* o = sub->add_option(flag, *v, help);
    o->delimiter(',');
    p.overrides.push_back([v, o, key = std::string(key)](Json& j) {
      if (o->count() > 0) j[key] = *v;
    });
  };
  auto bind_ilist = [](CLI::App* sub, Pending& p, const char* flag, const char* key,
                       const char* help) {
    auto v = std::make_shared<std::vector<long long>>();
    CLI::Option* o = sub->add_option(flag, *v, help);
    o->delimiter(',');
    p.overrides.push_back([v, o, key = std::string(key)](Json& j) {
      if (o->count() > 0) j[key] = *v;
    });
  };

  Pending p_flow, p_xsharp, p_project, p_phi, p_hbar, p_pc, p_corr, p_homog, p_res, p_conv;

  CLI::App* s_flow = app.add_subcommand("flow", "Integrate one trajectory");
  wire(s_flow, p_flow);
  bind_string(s_flow, p_flow, "--potential", "potential", "potential preset");
  bind_dlist(s_flow, p_flow, "--y0", "y0", "initial position (per axis)");
  bind_dlist(s_flow, p_flow, "--xi0", "xi0", "initial momentum (per axis)");
  bind_double(s_flow, p_flow, "--T", "T", "horizon");
  bind_double(s_flow, p_flow, "--step", "h", "time step");
  bind_int(s_flow, p_flow, "--stride", "stride", "sample every n-th step");
  bind_string(s_flow, p_flow, "--output", "output", "output prefix");

  CLI::App* s_xsharp = app.add_subcommand("xsharp", "Mean drift: empirical vs closed form");
  wire(s_xsharp, p_xsharp);
  bind_string(s_xsharp, p_xsharp, "--potential", "potential", "potential preset");
  bind_double(s_xsharp, p_xsharp, "--y0", "y0", "initial position");
  bind_double(s_xsharp, p_xsharp, "--xi0", "xi0", "initial momentum");
  bind_double(s_xsharp, p_xsharp, "--T", "T", "averaging horizon");
  bind_double(s_xsharp, p_xsharp, "--step", "h", "time step");
  bind_ilist(s_xsharp, p_xsharp, "--seeds", "seeds", "random-phase realization seeds");
  bind_string(s_xsharp, p_xsharp, "--output", "output", "output prefix");
  bind_int(s_xsharp, p_xsharp, "--jobs", "jobs", "worker threads (0 = hardware)",
           "HOMOKIN_JOBS");

  CLI::App* s_project = app.add_subcommand("project", "Empirical projection vs closed form");
  wire(s_project, p_project);
  bind_string(s_project, p_project, "--potential", "potential", "potential preset");
  bind_double(s_project, p_project, "--y0", "y0", "initial position");
  bind_double(s_project, p_project, "--xi0", "xi0", "initial momentum");
  bind_double(s_project, p_project, "--T", "T", "averaging horizon");
  bind_double(s_project, p_project, "--step", "h", "time step");
  bind_double(s_project, p_project, "--ball-radius", "ball_radius",
              "phase-space ball radius (0 = single orbit)");
  bind_int(s_project, p_project, "--ball-samples", "ball_samples", "starts inside the ball");
  bind_int(s_project, p_project, "--ball-seed", "ball_seed", "ball offset seed");
  bind_ilist(s_project, p_project, "--seeds", "seeds", "random-phase realization seeds");
  bind_string(s_project, p_project, "--output", "output", "output prefix");
  bind_int(s_project, p_project, "--jobs", "jobs", "worker threads (0 = hardware)",
           "HOMOKIN_JOBS");

  CLI::App* s_phi = app.add_subcommand("phi", "Effective velocity over an energy grid");
  wire(s_phi, p_phi);
  bind_string(s_phi, p_phi, "--potential", "potential", "potential preset");
  bind_double(s_phi, p_phi, "--emin", "emin", "lowest energy");
  bind_double(s_phi, p_phi, "--emax", "emax", "highest energy");
  bind_int(s_phi, p_phi, "--n", "n", "grid points");
  bind_string(s_phi, p_phi, "--output", "output", "output prefix");
  bind_int(s_phi, p_phi, "--jobs", "jobs", "worker threads (0 = hardware)", "HOMOKIN_JOBS");

  CLI::App* s_hbar = app.add_subcommand("hbar", "Effective Hamiltonian over a momentum grid");
  wire(s_hbar, p_hbar);
  bind_string(s_hbar, p_hbar, "--potential", "potential", "potential preset");
  bind_double(s_hbar, p_hbar, "--pmin", "pmin", "lowest momentum");
  bind_double(s_hbar, p_hbar, "--pmax", "pmax", "highest momentum");
  bind_int(s_hbar, p_hbar, "--n", "n", "grid points");
  bind_double(s_hbar, p_hbar, "--kink-tol", "kink_tol", "half-width of the kink exclusion");
  bind_string(s_hbar, p_hbar, "--output", "output", "output prefix");
  bind_int(s_hbar, p_hbar, "--jobs", "jobs", "worker threads (0 = hardware)", "HOMOKIN_JOBS");

  CLI::App* s_pc = app.add_subcommand("project-closed", "Closed-form projection energy table");
  wire(s_pc, p_pc);
  bind_string(s_pc, p_pc, "--potential", "potential", "potential preset");
  bind_double(s_pc, p_pc, "--emin", "emin", "lowest energy");
  bind_double(s_pc, p_pc, "--emax", "emax", "highest energy");
  bind_int(s_pc, p_pc, "--n", "n", "grid points");
  bind_double(s_pc, p_pc, "--sigma", "sigma", "momentum sign on running shells");
  bind_double(s_pc, p_pc, "--y-anchor", "y_anchor", "well anchor for trapped shells");
  bind_string(s_pc, p_pc, "--output", "output", "output prefix");
  bind_int(s_pc, p_pc, "--jobs", "jobs", "worker threads (0 = hardware)", "HOMOKIN_JOBS");

  CLI::App* s_corr = app.add_subcommand("corrector", "Sublinear corrector profile");
  wire(s_corr, p_corr);
  bind_string(s_corr, p_corr, "--potential", "potential", "potential preset");
  bind_double(s_corr, p_corr, "--p", "p", "momentum level");
  bind_int(s_corr, p_corr, "--n-points", "n_points", "profile sample count");
  bind_double(s_corr, p_corr, "--span", "span", "half-width of the profile window");
  bind_int(s_corr, p_corr, "--seed", "seed", "random-phase realization seed");
  bind_string(s_corr, p_corr, "--output", "output", "output prefix");

  CLI::App* s_homog = app.add_subcommand("homogenize", "Two-scale residual ladder");
  wire(s_homog, p_homog);
  bind_string(s_homog, p_homog, "--potential", "potential", "potential preset");
  bind_dlist(s_homog, p_homog, "--eps", "eps", "scale ladder, e.g. 0.1,0.05,0.025");
  bind_double(s_homog, p_homog, "--t", "t", "residual evaluation time");
  bind_double(s_homog, p_homog, "--T", "T", "weak time-average horizon");
  bind_int(s_homog, p_homog, "--n-samples", "n_samples", "quasi-random samples per norm");
  bind_ilist(s_homog, p_homog, "--seeds", "seeds", "sampling seeds");
  bind_double(s_homog, p_homog, "--cell-step", "cell_step", "integrator step in cell time");
  bind_string(s_homog, p_homog, "--output", "output", "output prefix");
  bind_int(s_homog, p_homog, "--jobs", "jobs", "worker threads (0 = hardware)", "HOMOKIN_JOBS");

  CLI::App* s_res = app.add_subcommand("resonance", "Per-axis periods and product-law report");
  wire(s_res, p_res);
  bind_dlist(s_res, p_res, "--y0", "y0", "initial positions (per axis)");
  bind_dlist(s_res, p_res, "--xi0", "xi0", "initial momenta (per axis)");
  bind_int(s_res, p_res, "--K", "K", "integer-relation search cutoff");
  bind_double(s_res, p_res, "--tol", "tol", "resonance tolerance");
  bind_int(s_res, p_res, "--fourier-order", "fourier_order", "coefficient cutoff");
  bind_double(s_res, p_res, "--T-avg", "T_avg", "joint averaging horizon");
  bind_double(s_res, p_res, "--step", "h", "time step");
  bind_string(s_res, p_res, "--output", "output", "output prefix");

  CLI::App* s_conv = app.add_subcommand("converge", "Energy-drift halving ladder");
  wire(s_conv, p_conv);
  bind_string(s_conv, p_conv, "--potential", "potential", "potential preset");
  bind_double(s_conv, p_conv, "--y0", "y0", "initial position");
  bind_double(s_conv, p_conv, "--xi0", "xi0", "initial momentum");
  bind_double(s_conv, p_conv, "--T", "T", "horizon");
  bind_double(s_conv, p_conv, "--h0", "h0", "coarsest step");
  bind_int(s_conv, p_conv, "--levels", "levels", "number of halvings");
  bind_string(s_conv, p_conv, "--output", "output", "output prefix");
  bind_int(s_conv, p_conv, "--jobs", "jobs", "worker threads (0 = hardware)", "HOMOKIN_JOBS");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (s_flow->parsed()) return run_flow(overlay(p_flow));
    if (s_xsharp->parsed()) return run_xsharp(overlay(p_xsharp));
    if (s_project->parsed()) return run_project(overlay(p_project));
    if (s_phi->parsed()) return run_phi(overlay(p_phi));
    if (s_hbar->parsed()) return run_hbar(overlay(p_hbar));
    if (s_pc->parsed()) return run_project_closed(overlay(p_pc));
    if (s_corr->parsed()) return run_corrector(overlay(p_corr));
    if (s_homog->parsed()) return run_homogenize(overlay(p_homog));
    if (s_res->parsed()) return run_resonance(overlay(p_res));
    if (s_conv->parsed()) return run_converge(overlay(p_conv));
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
