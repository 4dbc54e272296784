#pragma once

#include <complex>
#include <vector>

#include "homokin/dynamics.hpp"
#include "homokin/observable.hpp"
#include "homokin/potential.hpp"

namespace homokin {

// Per-axis orbit periods and energies of a separable N-dimensional state.
struct PeriodVector {
  std::vector<double> thetas;    // orbit period per axis, > 0
  std::vector<double> energies;  // per-axis energy H_i(y_i, xi_i)
};

// Periods of each axis orbit through `state` under the per-axis potentials.
PeriodVector axis_periods(const std::vector<Potential>& axes, const PhasePoint& state,
                          double band_rel = 1e-3);

// True iff no integer combination k/theta vanishes numerically:
// |sum_i k_i / theta_i| > tol for every integer vector with 0 < max|k_i| <= K.
// A float test with cutoff and tolerance; both knobs should be reported
// alongside any verdict.
bool noncommensurate(const PeriodVector& periods, int K = 50, double tol = 1e-9);

// Product of per-axis orbit averages of the factors. Valid when the periods
// pass the noncommensurate test; otherwise throws ResonantState and callers
// must fall back to resonant_limit or an empirical joint average.
double project_separable(const std::vector<Potential>& axes, const std::vector<Observable>& fs,
                         const PhasePoint& state, int K = 50, double tol = 1e-9,
                         double band_rel = 1e-3);

// Fourier coefficients a_l, |l| <= max_order, of the period-T0 signal
// t -> F(Y(t), Xi(t)) along the axis orbit through `axis_state`.
struct FourierSeries {
  std::vector<std::complex<double>> coeffs;  // index l + max_order()
  int max_order() const { return (static_cast<int>(coeffs.size()) - 1) / 2; }
  std::complex<double> at(int l) const { return coeffs[static_cast<size_t>(l + max_order())]; }
};

FourierSeries orbit_fourier_coeffs(const Potential& u, const Observable& F,
                                   const PhasePoint& axis_state, double T0, int max_order,
                                   int n_samples = 4096);

// Joint long-time average of a product observable when every axis shares the
// period T0: the constrained sum over k_1 + ... + k_N = 0 of prod_j a_{j,k_j}.
// truncation_bound is the change when the cutoff is halved.
struct ResonantSum {
  double value = 0.0;
  double truncation_bound = 0.0;
};

ResonantSum resonant_limit(const std::vector<FourierSeries>& axes, double T0);

// Sequential per-axis averaging of a joint (not necessarily separable)
// observable, axes taken in `order` (empty = natural order). The result is
// independent of the order; tests exercise that invariance.
double projection_composition(const std::vector<Potential>& axes, const Observable& F,
                              const PhasePoint& state, std::vector<int> order = {},
                              int K = 50, double tol = 1e-9, double band_rel = 1e-3);

}  // namespace homokin
