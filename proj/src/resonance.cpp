#include "homokin/resonance.hpp"

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>

#include "homokin/closedform.hpp"
#include "homokin/errors.hpp"

namespace homokin {

namespace {

void check_axes(const std::vector<Potential>& axes, const PhasePoint& state) {
  if (axes.empty()) throw ValidationError("need at least one axis potential");
  for (const Potential& u : axes)
    if (u.dim() != 1) throw DimensionMismatch("axis potentials must be one-dimensional");
  if (state.dim() != static_cast<int>(axes.size()))
    throw DimensionMismatch("state dimension does not match the axis count");
}

}  // namespace

PeriodVector axis_periods(const std::vector<Potential>& axes, const PhasePoint& state,
                          double band_rel) {
  check_axes(axes, state);
  PeriodVector pv;
  for (size_t i = 0; i < axes.size(); ++i) {
    const double E = 0.5 * state.xi[i] * state.xi[i] + axes[i].value1(state.y[i]);
    pv.energies.push_back(E);
    pv.thetas.push_back(period_1d(axes[i], E, state.y[i], band_rel));
  }
  return pv;
}

bool noncommensurate(const PeriodVector& periods, int K, double tol) {
  if (K < 1) throw ValidationError("resonance cutoff must be at least 1");
  if (!(tol >= 0.0)) throw ValidationError("resonance tolerance must be nonnegative");
  const int n = static_cast<int>(periods.thetas.size());
  if (n == 0) throw ValidationError("empty period vector");
  std::vector<double> freq(n);
  for (int i = 0; i < n; ++i) {
    if (!(periods.thetas[i] > 0.0)) throw ValidationError("periods must be positive");
    freq[i] = 1.0 / periods.thetas[i];
  }
  // Depth-first over k in [-K, K]^n; the leading nonzero entry is taken
  // positive since k and -k test the same combination.
  std::vector<int> k(n, 0);
  bool ok = true;
  auto walk = [&](auto&& self, int axis, bool lead_zero, double acc) -> void {
    if (!ok) return;
    if (axis == n) {
      if (!lead_zero && std::fabs(acc) <= tol) ok = false;
      return;
    }
    const int lo = lead_zero ? 0 : -K;
    for (int v = lo; v <= K; ++v) self(self, axis + 1, lead_zero && v == 0, acc + v * freq[axis]);
  };
  walk(walk, 0, true, 0.0);
  return ok;
}

double project_separable(const std::vector<Potential>& axes, const std::vector<Observable>& fs,
                         const PhasePoint& state, int K, double tol, double band_rel) {
  check_axes(axes, state);
  if (fs.size() != axes.size())
    throw ValidationError("need one observable factor per axis");
  if (!noncommensurate(axis_periods(axes, state, band_rel), K, tol))
    throw ResonantState("axis periods admit an integer relation; the product law fails");
  double prod = 1.0;
  for (size_t i = 0; i < axes.size(); ++i)
    prod *= project_state(axes[i], fs[i], {state.y[i], state.xi[i]}, band_rel);
  return prod;
}

FourierSeries orbit_fourier_coeffs(const Potential& u, const Observable& F,
                                   const PhasePoint& axis_state, double T0, int max_order,
                                   int n_samples) {
  if (u.dim() != 1 || axis_state.dim() != 1)
    throw DimensionMismatch("orbit coefficients are per-axis quantities");
  if (!(T0 > 0.0)) throw ValidationError("period must be positive");
  if (max_order < 0) throw ValidationError("coefficient order must be nonnegative");
  if (n_samples < std::max(16, 4 * max_order))
    throw ValidationError("too few samples for the requested coefficient order");
  const double h = T0 / static_cast<double>(n_samples);
  Stepper stepper(u, h);
  PhasePoint s = axis_state;
  FourierSeries out;
  out.coeffs.assign(2 * static_cast<size_t>(max_order) + 1, {0.0, 0.0});
  // Rectangle rule over one full period: exact-order accuracy for a periodic
  // signal, so the orbit closure error dominates.
  for (int m = 0; m < n_samples; ++m) {
    const double f = F(s.y, s.xi);
    const double base = -2.0 * std::numbers::pi * m / static_cast<double>(n_samples);
    for (int l = -max_order; l <= max_order; ++l)
      out.coeffs[static_cast<size_t>(l + max_order)] +=
          f * std::polar(1.0, base * static_cast<double>(l));
    stepper.advance(s);
  }
  for (auto& c : out.coeffs) c /= static_cast<double>(n_samples);
  return out;
}

namespace {

// Constrained coefficient sum over k_1 + ... + k_N = 0 with per-axis cutoff
// |k_j| <= limit_j, folded as an iterated convolution.
double constrained_sum(const std::vector<FourierSeries>& axes, const std::vector<int>& limits) {
  std::vector<std::complex<double>> acc{{1.0, 0.0}};
  int acc_order = 0;  // acc[idx] holds total order idx - acc_order
  for (size_t j = 0; j < axes.size(); ++j) {
    const int lj = limits[j];
    std::vector<std::complex<double>> next(acc.size() + 2 * static_cast<size_t>(lj), {0.0, 0.0});
    for (size_t i = 0; i < acc.size(); ++i)
      for (int l = -lj; l <= lj; ++l)
        next[i + static_cast<size_t>(l + lj)] += acc[i] * axes[j].at(l);
    acc = std::move(next);
    acc_order += lj;
  }
  return acc[static_cast<size_t>(acc_order)].real();
}

}  // namespace

ResonantSum resonant_limit(const std::vector<FourierSeries>& axes, double T0) {
  if (axes.empty()) throw ValidationError("need at least one coefficient list");
  if (!(T0 > 0.0)) throw ValidationError("period must be positive");
  std::vector<int> full, half;
  for (const FourierSeries& a : axes) {
    full.push_back(a.max_order());
    half.push_back(a.max_order() / 2);
  }
  ResonantSum out;
  out.value = constrained_sum(axes, full);
  out.truncation_bound = std::fabs(out.value - constrained_sum(axes, half));
  return out;
}

double projection_composition(const std::vector<Potential>& axes, const Observable& F,
                              const PhasePoint& state, std::vector<int> order, int K, double tol,
                              double band_rel) {
  check_axes(axes, state);
  const int n = static_cast<int>(axes.size());
  if (F.dim() > 0 && F.dim() != n)
    throw DimensionMismatch("joint observable dimension does not match the axis count");
  if (order.empty())
    for (int i = 0; i < n; ++i) order.push_back(i);
  std::vector<char> seen(n, 0);
  for (int j : order) {
    if (j < 0 || j >= n || seen[j]) throw ValidationError("order must be a permutation of the axes");
    seen[j] = 1;
  }
  if (static_cast<int>(order.size()) != n)
    throw ValidationError("order must be a permutation of the axes");
  if (!noncommensurate(axis_periods(axes, state, band_rel), K, tol))
    throw ResonantState("axis periods admit an integer relation; the product law fails");

  // Work coordinates mutated by the nested per-axis quadratures; each level
  // pins one axis to its quadrature node before descending.
  std::vector<double> y_work = state.y, xi_work = state.xi;
  std::function<double(int)> level = [&](int pos) -> double {
    if (pos == n) return F(y_work, xi_work);
    const int j = order[pos];
    Observable slice{"slice", 1,
                     [&, pos, j](std::span<const double> ya, std::span<const double> xia) {
                       y_work[j] = ya[0];
                       xi_work[j] = xia[0];
                       return level(pos + 1);
                     }};
    return project_state(axes[j], slice, {state.y[j], state.xi[j]}, band_rel);
  };
  return level(0);
}

}  // namespace homokin
