#pragma once

#include <cstdint>
#include <functional>

#include "homokin/dynamics.hpp"
#include "homokin/observable.hpp"
#include "homokin/parallel.hpp"
#include "homokin/potential.hpp"

namespace homokin {

// Macroscopic coefficient a(x): smooth, compactly supported, with numerically
// tabulated sup and Lipschitz bounds. One space dimension.
struct MacroFunction {
  std::function<double(double)> fn;  // zero outside [center - radius, center + radius]
  double center = 0.0;
  double radius = 0.0;
  double sup_bound = 0.0;
  double lipschitz_bound = 0.0;

  double operator()(double x) const { return fn ? fn(x) : 0.0; }

  // C-infinity bump of the given height supported on [center-radius, center+radius].
  static MacroFunction bump(double center, double radius, double height);
  static MacroFunction zero();
};

// Separable initial data a(x) * b(y, xi). Sums of such terms extend by linearity.
struct InitialData {
  MacroFunction macro;
  Observable micro;

  double value(double x, double y, double xi) const;
};

// Asymptotic description of the slow/fast split: the effective drift per cell
// state, the cell average of b, and the mean-free remainder.
struct TwoScaleProfile {
  std::function<double(const PhasePoint&)> xsharp_field;
  Observable b_projected;  // orbit average of b, constant along the cell flow
  Observable b_defect;     // b minus its orbit average

  // The projected/defect observables share one orbit-keyed memo, so they are
  // cheap along a single trajectory but must not be shared across threads.
};

TwoScaleProfile build_profile(const Potential& u, const InitialData& f0,
                              double band_rel = 1e-3, double cache_rel = 1e-6);

// Value at (t, x, xi) of the transported initial data: pull (x/eps, xi) back
// along the cell flow for duration t/eps and read a(eps*Y) * b(Y, Xi).
double eval_f_eps(const Potential& u, const InitialData& f0, double eps, double t,
                  double x, double xi, double cell_step = 1e-3);

// Slow profile: a(x - t * xsharp(y, xi)) * b_projected(y, xi).
double eval_f_profile(const TwoScaleProfile& profile, const InitialData& f0, double t,
                      double x, double y, double xi);

// Fast corrector profile: a(x - t * xsharp(y, xi)) * b_defect at the cell-flow
// image of (y, xi) at cell time tau (tau may be negative).
double eval_g_profile(const Potential& u, const TwoScaleProfile& profile,
                      const InitialData& f0, double t, double x, double tau,
                      double y, double xi, double cell_step = 1e-3);

// Rectangular sampling window in the macroscopic (x, xi) plane.
struct Box {
  double x_lo = 0.0, x_hi = 0.0;
  double xi_lo = 0.0, xi_hi = 0.0;

  double volume() const { return (x_hi - x_lo) * (xi_hi - xi_lo); }
};

// Quasi-random norm estimate. std_error comes from independently rotated
// replicas of the point set; samples whose cell state sits in the critical
// band are excluded and counted.
struct SampledNorm {
  double value = 0.0;
  double std_error = 0.0;
  long n_used = 0;
  long n_skipped = 0;
};

// Mean over the box of |f_eps - f_profile - g_profile| at time t, with the
// profiles read at y = x/eps, tau = t/eps. One cell-flow solve per sample
// serves both f_eps and the defect term.
SampledNorm residual_norm(const Potential& u, const InitialData& f0, double eps, double t,
                          const Box& region, long n_samples, std::uint64_t seed = 0,
                          par::Exec mode = par::Exec::Serial, double cell_step = 1e-3);

// L1 norm over the box of | integral_0^T g(t, x; t/eps, x/eps, xi) dt |,
// the time integral taken by composite trapezoid with macro step <= eps/20.
SampledNorm weak_time_average_g(const Potential& u, const InitialData& f0, double eps,
                                double T, const Box& region, long n_samples,
                                std::uint64_t seed = 0, par::Exec mode = par::Exec::Serial,
                                double cell_step = 1e-3);

// Sampled mass comparison behind the finite-speed support bound: lhs is the
// mass of |f_eps(t)| on [-R,R] x [-Rp,Rp]; rhs is the mass of the initial data
// over the enlarged window reachable in time t given |Xi| <= sqrt(Rp^2 + 2 sup u).
struct PropagationBound {
  double lhs = 0.0, rhs = 0.0;
  double lhs_error = 0.0, rhs_error = 0.0;
  long n_samples = 0;
};

PropagationBound propagation_check(const Potential& u, const InitialData& f0, double eps,
                                   double t, double R, double Rp, long n_samples = 2048,
                                   std::uint64_t seed = 0, par::Exec mode = par::Exec::Serial,
                                   double cell_step = 1e-3);

}  // namespace homokin
