#include "homokin/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homokin/quadrature.hpp"

namespace homokin {

namespace {

// Averages f over the cell, splitting at the touch points of the ceiling so
// each piece sees any kink or boundary layer only at an endpoint, where the
// sin^2 substitution clusters nodes.
double average_split_at_maxima(const Potential& u, const std::function<double(double)>& f) {
  const std::vector<double> maxima = u.interior_maxima();
  if (maxima.empty()) return u.average_position(f);
  const double L = u.domain_length();
  double total = 0.0;
  for (size_t i = 0; i < maxima.size(); ++i) {
    const double a = maxima[i];
    const double b = i + 1 < maxima.size() ? maxima[i + 1] : maxima[0] + L;
    total += quad::integrate_singular(f, a, b, true, true);
  }
  return total / L;
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

double phi(const Potential& u, double E, double band_rel) {
  const double ceiling = u.u_max();
  if (std::fabs(E - ceiling) <= critical_band(u, band_rel))
    throw CriticalEnergyError("energy inside the critical band");
  if (E < ceiling) return 0.0;
  WeightFunctional w;
  w.energy = E;
  w.inverse_sqrt_singular = true;
  w.w = [E](double v) { return 1.0 / std::sqrt(std::max(E - v, std::numeric_limits<double>::min())); };
  const double denom = u.cell_average(w);
  return std::numbers::sqrt2 / denom;
}

double theta(const Potential& u, double lambda) {
  if (lambda < 0.0) throw ValidationError("theta needs lambda >= 0");
  if (lambda == 0.0) return theta0(u);
  const double ceiling = u.u_max();
  auto f = [&](double y) { return std::sqrt(std::max(2.0 * (ceiling - u.value1(y)) + lambda, 0.0)); };
  if (u.kind() == PotentialKind::Constant) return std::sqrt(lambda);
  return average_split_at_maxima(u, f);
}

double theta0(const Potential& u) {
  if (u.kind() == PotentialKind::Constant) return 0.0;
  const double ceiling = u.u_max();
  auto f = [&](double y) { return std::sqrt(std::max(2.0 * (ceiling - u.value1(y)), 0.0)); };
  return average_split_at_maxima(u, f);
}

double theta_prime(const Potential& u, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("theta_prime needs lambda > 0");
  if (u.kind() == PotentialKind::Constant) return 0.5 / std::sqrt(lambda);
  const double ceiling = u.u_max();
  auto f = [&](double y) {
    return 1.0 / std::sqrt(std::max(2.0 * (ceiling - u.value1(y)) + lambda,
                                    std::numeric_limits<double>::min()));
  };
  return 0.5 * average_split_at_maxima(u, f);
}

double hbar(const Potential& u, double p) {
  const double ap = std::fabs(p);
  const double t0 = theta0(u);
  if (ap <= t0) return u.u_max();
  // theta(lambda) >= sqrt(lambda), so lambda = p^2 brackets the inversion
  const double lambda = quad::bracketed_root([&](double l) { return theta(u, l) - ap; }, 0.0,
                                             ap * ap, 1e-13 * std::max(1.0, ap * ap));
  return u.u_max() + 0.5 * lambda;
}

double hbar_prime(const Potential& u, double p, double kink_tol) {
  const double ap = std::fabs(p);
  const double t0 = theta0(u);
  if (t0 > kink_tol && std::fabs(ap - t0) <= kink_tol * std::max(1.0, t0))
    throw KinkError("momentum too close to the flat-segment edge");
  if (ap <= t0) return 0.0;
  if (ap == 0.0) return 0.0;
  const double lambda = 2.0 * (hbar(u, p) - u.u_max());
  return sign_of(p) * 0.5 / theta_prime(u, lambda);
}

double p_of_state(const Potential& u, const PhasePoint& s) {
  if (s.dim() != 1) throw DimensionMismatch("momentum labels are one-dimensional");
  const double E = hamiltonian(u, s);
  if (!(E > u.u_max())) throw EnergyBelowCritical("state energy at or below the ceiling");
  const double p = sign_of(s.xi[0]) * theta(u, 2.0 * (E - u.u_max()));
  // the label must invert back to the energy it came from
  const double back = hbar(u, p);
  if (std::fabs(back - E) > 1e-9 * std::max(1.0, std::fabs(E)))
    throw NumericError("momentum label failed the round-trip check");
  return p;
}

double xsharp_closed(const Potential& u, const PhasePoint& s) {
  if (s.dim() != 1) throw DimensionMismatch("closed-form drift is one-dimensional");
  const double E = hamiltonian(u, s);
  return sign_of(s.xi[0]) * phi(u, E);
}

double project_running(const Potential& u, const Observable& F, double E, double sigma,
                       double band_rel) {
  if (!(E > u.u_max() + critical_band(u, band_rel)))
    throw CriticalEnergyError("running projection needs energy above the critical band");
  if (sigma != 1.0 && sigma != -1.0) throw ValidationError("momentum sign must be +1 or -1");
  auto speed = [&](double y) {
    return std::sqrt(std::max(2.0 * (E - u.value1(y)), std::numeric_limits<double>::min()));
  };
  const double num = u.average_position([&](double y) {
    const double v = speed(y);
    return F.eval1(y, sigma * v) / v;
  });
  const double den = u.average_position([&](double y) { return 1.0 / speed(y); });
  return num / den;
}

double project_trapped(const Potential& u, const Observable& F, double E, double y_anchor,
                       double band_rel) {
  if (u.dim() != 1) throw DimensionMismatch("trapped projection is one-dimensional");
  if (!(E < u.u_max() - critical_band(u, band_rel)))
    throw CriticalEnergyError("trapped projection needs energy below the critical band");
  Well w = u.well_containing(y_anchor, E);
  auto margin = [&](double y) { return E - u.value1(y); };
  w.lo = quad::nudge_inside(margin, w.lo, w.hi);
  w.hi = quad::nudge_inside(margin, w.hi, w.lo);
  auto speed = [&](double y) {
    return std::sqrt(std::max(2.0 * (E - u.value1(y)), std::numeric_limits<double>::min()));
  };
  const quad::Options opt = quad::singular_options();
  const double num = quad::integrate_singular(
      [&](double y) {
        const double v = speed(y);
        return (F.eval1(y, v) + F.eval1(y, -v)) / v;
      },
      w.lo, w.hi, true, true, opt);
  const double den = quad::integrate_singular([&](double y) { return 1.0 / speed(y); }, w.lo, w.hi,
                                              true, true, opt);
  return num / (2.0 * den);
}

double project_state(const Potential& u, const Observable& F, const PhasePoint& s,
                     double band_rel) {
  if (s.dim() != 1) throw ProjectionUnavailable("multi-axis states are handled per axis");
  switch (classify(u, s, band_rel)) {
    case OrbitClass::NearCritical:
      throw CriticalEnergyError("state too close to the critical energy to project");
    case OrbitClass::Running:
      return project_running(u, F, hamiltonian(u, s), sign_of(s.xi[0]), band_rel);
    case OrbitClass::Trapped:
      return project_trapped(u, F, hamiltonian(u, s), s.y[0], band_rel);
  }
  throw NumericError("unreachable orbit class");
}

IdentityPair lagrangian_identity_check(const Potential& u, double y, double xi) {
  if (u.dim() != 1) throw DimensionMismatch("identity check is one-dimensional");
  const PhasePoint s{y, xi};
  const double E = hamiltonian(u, s);
  const Observable L{"lagrangian", 1,
                     [&u](std::span<const double> yy, std::span<const double> xx) {
                       return 0.5 * xx[0] * xx[0] - u.value1(yy[0]);
                     }};
  IdentityPair out;
  out.lhs = project_running(u, L, E, sign_of(xi));
  out.rhs = lagrangian_dual(u, xsharp_closed(u, s)).value;
  return out;
}

DualPoint lagrangian_dual(const Potential& u, double v) {
  const double av = std::fabs(v);
  const double t0 = theta0(u);
  double hi = t0 + 1.0;
  for (int i = 0; i < 64 && hbar_prime(u, hi) <= av; ++i) hi *= 2.0;
  if (hbar_prime(u, hi) <= av) throw NumericError("dual bracket did not close");
  auto g = [&](double q) { return q * av - hbar(u, q); };
  const double q = quad::golden_section_max(g, 0.0, hi, 1e-10 * std::max(1.0, hi));
  DualPoint out;
  out.value = g(q);
  out.argmax = v < 0.0 ? -q : q;
  return out;
}

CorrectorProfile corrector_profile(const Potential& u, double p, int n_points, double span) {
  if (n_points < 4) throw ValidationError("corrector profile needs at least four points");
  if (n_points % 2 != 0) throw ValidationError("corrector grid must have an even point count");
  if (!(span > 0.0)) throw ValidationError("corrector span must be positive");
  if (std::fabs(p) <= theta0(u))
    throw ValidationError("corrector needs a momentum label beyond the flat segment");
  const double E = hbar(u, p);
  auto g = [&](double y) { return std::sqrt(std::max(2.0 * (E - u.value1(y)), 0.0)); };
  CorrectorProfile out;
  out.span = span;
  out.y.resize(n_points + 1);
  out.w.resize(n_points + 1);
  quad::Options opt;
  opt.rel_tol = 1e-11;
  auto segment = [&](double a, double b) {
    try {
      return quad::integrate(g, a, b, opt);
    } catch (const QuadratureError&) {
      // near the flat-segment edge the speed dips toward zero at the ceiling
      // touches; refine those spots locally
      return quad::integrate_adaptive(g, a, b, opt);
    }
  };
  const double sgn = sign_of(p);
  const int mid = n_points / 2;
  out.y[mid] = 0.0;
  out.w[mid] = 0.0;
  double cum = 0.0;
  for (int i = mid + 1; i <= n_points; ++i) {
    const double a = span * (i - 1 - mid) / mid;
    const double b = span * (i - mid) / mid;
    cum += segment(a, b);
    out.y[i] = b;
    out.w[i] = sgn * cum - p * b;
  }
  cum = 0.0;
  for (int i = mid - 1; i >= 0; --i) {
    const double a = -span * (mid - i) / mid;
    const double b = -span * (mid - i - 1) / mid;
    cum += segment(a, b);
    out.y[i] = a;
    // integral from 0 to a equals minus the integral from a to 0
    out.w[i] = -sgn * cum - p * a;
  }
  double ratio = 0.0;
  for (int i = 0; i <= n_points; ++i)
    if (std::fabs(out.y[i]) >= 0.5 * span)
      ratio = std::max(ratio, std::fabs(out.w[i]) / (1.0 + std::fabs(out.y[i])));
  out.sublinearity_ratio = ratio;
  return out;
}

EffectiveVelocityTable phi_table(const Potential& u, double e_lo, double e_hi, int n,
                                 par::Exec mode) {
  if (n < 1) throw ValidationError("table needs at least one row");
  if (!(e_hi >= e_lo)) throw ValidationError("energy grid bounds out of order");
  EffectiveVelocityTable t;
  t.energies.resize(n);
  t.phi_values.resize(n);
  const double band = critical_band(u);
  for (int i = 0; i < n; ++i) {
    t.energies[i] = n == 1 ? e_lo : e_lo + (e_hi - e_lo) * i / (n - 1);
    if (std::fabs(t.energies[i] - u.u_max()) <= band)
      throw ValidationError("energy grid point inside the critical band");
  }
  par::for_each_index(mode, n, [&](long i) { t.phi_values[i] = phi(u, t.energies[i]); });
  return t;
}

}  // namespace homokin
