#include "homokin/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "homokin/closedform.hpp"
#include "homokin/errors.hpp"
#include "homokin/lowdisc.hpp"

namespace homokin {

namespace {

double bump_shape(double s) {
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

void check_box(const Box& region) {
  if (!(region.x_hi > region.x_lo) || !(region.xi_hi > region.xi_lo))
    throw ValidationError("sampling box must have positive extent");
}

void check_samples(long n_samples) {
  if (n_samples < 1) throw ValidationError("need at least one sample");
}

}  // namespace

MacroFunction MacroFunction::bump(double center, double radius, double height) {
  if (!(radius > 0.0)) throw ValidationError("bump radius must be positive");
  MacroFunction a;
  a.center = center;
  a.radius = radius;
  a.sup_bound = std::fabs(height);
  a.fn = [center, radius, height](double x) {
    return height * bump_shape((x - center) / radius);
  };
  // Tabulate the slope bound; the shape is smooth so a dense scan suffices.
  const int n = 20000;
  double m = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = a.fn(center - radius + 2.0 * radius * i / n);
    if (i > 0) m = std::max(m, std::fabs(v - prev) * n / (2.0 * radius));
    prev = v;
  }
  a.lipschitz_bound = 1.05 * m;
  return a;
}

MacroFunction MacroFunction::zero() { return MacroFunction{}; }

double InitialData::value(double x, double y, double xi) const {
  return macro(x) * micro.eval1(y, xi);
}

namespace {

// Orbit-keyed memo for the cell average of b. Along one trajectory the energy,
// the momentum sign (running) and the confining well (trapped) are invariant,
// so repeated defect evaluations cost a single quadrature.
struct OrbitMemo {
  bool valid = false;
  OrbitClass cls = OrbitClass::Running;
  double energy = 0.0;
  double sigma = 0.0;
  double well_lo = 0.0;
  double well_hi = 0.0;
  double projection = 0.0;
};

double memoized_projection(const Potential& u, const Observable& F, OrbitMemo& memo,
                           double y, double xi, double band_rel, double cache_rel) {
  PhasePoint s{y, xi};
  const double E = hamiltonian(u, s);
  const OrbitClass cls = classify(u, s, band_rel);
  const double sigma = xi < 0.0 ? -1.0 : 1.0;
  const bool same_shell =
      memo.valid && cls == memo.cls &&
      std::fabs(E - memo.energy) <= cache_rel * std::max(1.0, std::fabs(E)) &&
      (cls == OrbitClass::Running ? sigma == memo.sigma
                                  : (y >= memo.well_lo && y <= memo.well_hi));
  if (!same_shell) {
    memo.projection = project_state(u, F, s, band_rel);
    memo.cls = cls;
    memo.energy = E;
    memo.sigma = sigma;
    if (cls == OrbitClass::Trapped) {
      const Well w = u.well_containing(y, E);
      memo.well_lo = w.lo;
      memo.well_hi = w.hi;
    }
    memo.valid = true;
  }
  return memo.projection;
}

}  // namespace

TwoScaleProfile build_profile(const Potential& u, const InitialData& f0, double band_rel,
                              double cache_rel) {
  if (u.dim() != 1) throw ProjectionUnavailable("profiles need the one-dimensional projection");
  auto up = std::make_shared<Potential>(u);
  auto bp = std::make_shared<Observable>(f0.micro);
  auto memo = std::make_shared<OrbitMemo>();

  TwoScaleProfile profile;
  profile.xsharp_field = [up](const PhasePoint& s) { return xsharp_closed(*up, s); };
  profile.b_projected = {"project(" + f0.micro.label() + ")", 1,
                         [up, bp, memo, band_rel, cache_rel](std::span<const double> y,
                                                             std::span<const double> xi) {
                           return memoized_projection(*up, *bp, *memo, y[0], xi[0], band_rel,
                                                      cache_rel);
                         }};
  profile.b_defect = {"defect(" + f0.micro.label() + ")", 1,
                      [up, bp, memo, band_rel, cache_rel](std::span<const double> y,
                                                          std::span<const double> xi) {
                        return (*bp)(y, xi) - memoized_projection(*up, *bp, *memo, y[0], xi[0],
                                                                  band_rel, cache_rel);
                      }};
  return profile;
}

double eval_f_eps(const Potential& u, const InitialData& f0, double eps, double t, double x,
                  double xi, double cell_step) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (t < 0.0) throw ValidationError("time must be nonnegative");
  if (u.dim() != 1) throw DimensionMismatch("scalar entry point needs a one-dimensional cell");
  PhasePoint s{x / eps, xi};
  if (t > 0.0) s = cell_flow(u, eps, t, {x, xi}, cell_step);
  return f0.macro(eps * s.y[0]) * f0.micro(s.y, s.xi);
}

double eval_f_profile(const TwoScaleProfile& profile, const InitialData& f0, double t, double x,
                      double y, double xi) {
  PhasePoint s{y, xi};
  return f0.macro(x - t * profile.xsharp_field(s)) * profile.b_projected(s.y, s.xi);
}

double eval_g_profile(const Potential& u, const TwoScaleProfile& profile, const InitialData& f0,
                      double t, double x, double tau, double y, double xi, double cell_step) {
  PhasePoint s{y, xi};
  const double drift = profile.xsharp_field(s);
  if (tau != 0.0) {
    const long n = steps_for(std::fabs(tau), cell_step);
    Stepper stepper(u, std::fabs(tau) / static_cast<double>(n));
    for (long i = 0; i < n; ++i) {
      if (tau > 0.0)
        stepper.advance(s);
      else
        stepper.advance_back(s);
    }
  }
  return f0.macro(x - t * drift) * profile.b_defect(s.y, s.xi);
}

namespace {

// Shared replica machinery: n_samples points split over independently rotated
// copies of the low-discrepancy set; the replica spread gives the std error.
constexpr int kReplicas = 8;

struct ReplicaPlan {
  std::vector<double> xs, xis;  // flattened sample coordinates
  std::vector<int> replica;     // replica id per sample
};

ReplicaPlan plan_samples(const Box& region, long n_samples, std::uint64_t seed) {
  ReplicaPlan plan;
  plan.xs.reserve(n_samples);
  plan.xis.reserve(n_samples);
  plan.replica.reserve(n_samples);
  const int reps = static_cast<int>(std::min<long>(kReplicas, n_samples));
  for (int r = 0; r < reps; ++r) {
    const long lo = n_samples * r / reps, hi = n_samples * (r + 1) / reps;
    HaltonSequence halton(2, seed * 1000003ULL + static_cast<std::uint64_t>(r));
    for (long i = lo; i < hi; ++i) {
      const std::vector<double> p = halton.next();
      plan.xs.push_back(region.x_lo + p[0] * (region.x_hi - region.x_lo));
      plan.xis.push_back(region.xi_lo + p[1] * (region.xi_hi - region.xi_lo));
      plan.replica.push_back(r);
    }
  }
  return plan;
}

// Deterministic seed-order reduction of per-sample values: overall mean over
// used samples plus the spread of per-replica means.
SampledNorm reduce_replicas(const ReplicaPlan& plan, const std::vector<double>& values,
                            const std::vector<char>& used) {
  SampledNorm out;
  double replica_sum[kReplicas] = {};
  long replica_n[kReplicas] = {};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!used[i]) {
      ++out.n_skipped;
      continue;
    }
    replica_sum[plan.replica[i]] += values[i];
    ++replica_n[plan.replica[i]];
    ++out.n_used;
  }
  if (out.n_used == 0) throw NoRunningRegion("every sample fell in the critical band");
  double total = 0.0;
  std::vector<double> means;
  for (int r = 0; r < kReplicas; ++r) {
    total += replica_sum[r];
    if (replica_n[r] > 0) means.push_back(replica_sum[r] / static_cast<double>(replica_n[r]));
  }
  out.value = total / static_cast<double>(out.n_used);
  if (means.size() > 1) {
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(means.size() - 1);
    out.std_error = std::sqrt(var / static_cast<double>(means.size()));
  }
  return out;
}

}  // namespace

SampledNorm residual_norm(const Potential& u, const InitialData& f0, double eps, double t,
                          const Box& region, long n_samples, std::uint64_t seed, par::Exec mode,
                          double cell_step) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (t < 0.0) throw ValidationError("time must be nonnegative");
  check_box(region);
  check_samples(n_samples);
  const ReplicaPlan plan = plan_samples(region, n_samples, seed);
  std::vector<double> values(n_samples, 0.0);
  std::vector<char> used(n_samples, 0);
  par::for_each_index(mode, n_samples, [&](long i) {
    const double x = plan.xs[i], xi = plan.xis[i];
    PhasePoint start{x / eps, xi};
    if (classify(u, start) == OrbitClass::NearCritical) return;
    const TwoScaleProfile profile = build_profile(u, f0);
    PhasePoint end = start;
    if (t > 0.0) end = cell_flow(u, eps, t, {x, xi}, cell_step);
    const double f_eps = f0.macro(eps * end.y[0]) * f0.micro(end.y, end.xi);
    const double shifted = f0.macro(x - t * profile.xsharp_field(start));
    const double f_prof = shifted * profile.b_projected(start.y, start.xi);
    const double g_prof = shifted * profile.b_defect(end.y, end.xi);
    values[i] = std::fabs(f_eps - f_prof - g_prof);
    used[i] = 1;
  });
  return reduce_replicas(plan, values, used);
}

SampledNorm weak_time_average_g(const Potential& u, const InitialData& f0, double eps, double T,
                                const Box& region, long n_samples, std::uint64_t seed,
                                par::Exec mode, double cell_step) {
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (!(T > 0.0)) throw ValidationError("horizon must be positive");
  check_box(region);
  check_samples(n_samples);
  const ReplicaPlan plan = plan_samples(region, n_samples, seed);
  const long n_t = std::max<long>(1, static_cast<long>(std::ceil(20.0 * T / eps)));
  const double dt = T / static_cast<double>(n_t);
  const long k = std::max<long>(1, static_cast<long>(std::ceil(dt / eps / cell_step)));
  const double h = dt / eps / static_cast<double>(k);
  std::vector<double> values(n_samples, 0.0);
  std::vector<char> used(n_samples, 0);
  par::for_each_index(mode, n_samples, [&](long i) {
    const double x = plan.xs[i], xi = plan.xis[i];
    PhasePoint s{x / eps, xi};
    if (classify(u, s) == OrbitClass::NearCritical) return;
    const TwoScaleProfile profile = build_profile(u, f0);
    const double drift = profile.xsharp_field(s);
    Stepper stepper(u, h);
    double acc = 0.5 * f0.macro(x) * profile.b_defect(s.y, s.xi);
    for (long j = 1; j <= n_t; ++j) {
      for (long m = 0; m < k; ++m) stepper.advance(s);
      const double tj = dt * static_cast<double>(j);
      const double g = f0.macro(x - tj * drift) * profile.b_defect(s.y, s.xi);
      acc += j == n_t ? 0.5 * g : g;
    }
    values[i] = std::fabs(acc * dt);
    used[i] = 1;
  });
  SampledNorm out = reduce_replicas(plan, values, used);
  out.value *= region.volume();
  out.std_error *= region.volume();
  return out;
}

PropagationBound propagation_check(const Potential& u, const InitialData& f0, double eps,
                                   double t, double R, double Rp, long n_samples,
                                   std::uint64_t seed, par::Exec mode, double cell_step) {
  if (!(R > 0.0) || !(Rp > 0.0)) throw ValidationError("window radii must be positive");
  if (t < 0.0) throw ValidationError("time must be nonnegative");
  check_samples(n_samples);
  const double xi_max = std::sqrt(Rp * Rp + 2.0 * u.u_max());
  const Box window{-R, R, -Rp, Rp};
  const Box reach{-(R + t * xi_max), R + t * xi_max, -xi_max, xi_max};

  const ReplicaPlan lhs_plan = plan_samples(window, n_samples, seed);
  std::vector<double> lhs_vals(n_samples, 0.0);
  std::vector<char> lhs_used(n_samples, 1);
  par::for_each_index(mode, n_samples, [&](long i) {
    lhs_vals[i] = std::fabs(eval_f_eps(u, f0, eps, t, lhs_plan.xs[i], lhs_plan.xis[i], cell_step));
  });
  const SampledNorm lhs = reduce_replicas(lhs_plan, lhs_vals, lhs_used);

  const ReplicaPlan rhs_plan = plan_samples(reach, n_samples, seed + 0x9E37ULL);
  std::vector<double> rhs_vals(n_samples, 0.0);
  std::vector<char> rhs_used(n_samples, 1);
  par::for_each_index(mode, n_samples, [&](long i) {
    rhs_vals[i] =
        std::fabs(f0.value(rhs_plan.xs[i], rhs_plan.xs[i] / eps, rhs_plan.xis[i]));
  });
  const SampledNorm rhs = reduce_replicas(rhs_plan, rhs_vals, rhs_used);

  PropagationBound out;
  out.lhs = lhs.value * window.volume();
  out.lhs_error = lhs.std_error * window.volume();
  out.rhs = rhs.value * reach.volume();
  out.rhs_error = rhs.std_error * reach.volume();
  out.n_samples = n_samples;
  return out;
}

}  // namespace homokin
