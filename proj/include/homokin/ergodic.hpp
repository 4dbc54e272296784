#pragma once

#include <cstdint>
#include <vector>

#include "homokin/dynamics.hpp"
#include "homokin/observable.hpp"
#include "homokin/parallel.hpp"
#include "homokin/potential.hpp"

namespace homokin {

// Trajectory statistics: time averages along the flow and their agreement
// with the closed-form cell averages.

struct ErgodicEstimate {
  double value = 0.0;                 // time average over the full horizon
  std::vector<double> window_means;   // partial averages at T/4, T/2, 3T/4, T
  double tail_variation = 0.0;        // max pairwise gap among the last two window means
  double T_used = 0.0;
  double step = 0.0;
};

// Trapezoid time average of F along the flow from `start` over [0, T].
// Streams; nothing is stored besides the running sums. Near-critical starts
// are rejected: their averages settle too slowly to mean anything.
ErgodicEstimate time_average(const Potential& u, const Observable& F, const PhasePoint& start,
                             double T, double h);

// Mean momentum over [0, T] read off the endpoint: position moves against the
// momentum, so the average is (y(0) - y(T)) / T, with no quadrature error.
// window_means carry the same readout at the quarter marks.
ErgodicEstimate xsharp_empirical(const Potential& u, const PhasePoint& start, double T, double h);

// Same quantity via the trapezoid average of the momentum observable; agrees
// with the endpoint form up to integrator order. Exposed for cross-checking.
double xsharp_quadrature(const Potential& u, const PhasePoint& start, double T, double h);

// Time average defining the projection of F at `start`. With ball_radius > 0
// the estimate is additionally averaged over `ball_samples` starts in a
// phase-space ball around `start` (low-discrepancy offsets, deterministic in
// ball_seed) — a smoothing for starts that may sit on an atypical orbit.
ErgodicEstimate project_empirical(const Potential& u, const Observable& F,
                                  const PhasePoint& start, double T, double h,
                                  double ball_radius = 0.0, int ball_samples = 8,
                                  std::uint64_t ball_seed = 0);

// F minus its orbit average at the sampled state's energy: the oscillating
// part that time-averages to zero. Projections are cached per energy level
// and refreshed when the queried energy moves by more than cache_rel.
Observable defect_observable(const Potential& u, const Observable& F, double cache_rel = 1e-6);

struct EnsembleStats {
  double mean = 0.0;
  double std_error = 0.0;   // sample stddev / sqrt(n_used)
  int n_used = 0;
  int n_skipped = 0;        // seeds whose start was not a running state
  std::vector<double> per_seed;
};

// Time average of F from (0, xi0) across independent realizations of the
// random field, seeds seed0 .. seed0+n_seeds-1. Non-running seeds are
// skipped, not errored. Results are reduced in seed order regardless of
// execution mode.
EnsembleStats ensemble_project(const RandomPhaseModel& model, const Observable& F, double xi0,
                               double T, double h, std::uint64_t seed0, int n_seeds,
                               par::Exec mode = par::Exec::Serial);

// Per-seed gap between the measured mean momentum (endpoint form) and the
// closed-form prediction computed from the same realization's window average.
// A mean gap within a few standard errors of zero is the ergodic consistency
// signal.
EnsembleStats ensemble_drift_gap(const RandomPhaseModel& model, double xi0, double T, double h,
                                 std::uint64_t seed0, int n_seeds,
                                 par::Exec mode = par::Exec::Serial);

}  // namespace homokin
