#pragma once

#include <functional>

#include "homokin/errors.hpp"

namespace homokin::quad {

struct Options {
  double rel_tol = 1e-12;   // stop when successive refinements agree to this
  double abs_tol = 1e-14;   // absolute floor for integrals near zero
  int points = 16;          // Gauss-Legendre points per panel
  int max_doublings = 14;   // panel counts 1, 2, 4, ..., 2^max_doublings
};

// Composite Gauss-Legendre with panel doubling until two successive levels
// agree. Throws QuadratureError when refinement does not stabilize or the
// integrand produces non-finite values.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opt = {});

// Same, for integrands with at worst inverse-square-root singularities at the
// flagged endpoints. Substitutes s = a + (b-a) sin^2(theta), which regularizes
// both endpoints, then integrates the smooth transform.
double integrate_singular(const std::function<double(double)>& f, double a, double b,
                          bool singular_left, bool singular_right, const Options& opt = {});

// Recursive bisection that concentrates panels where a panel and its two
// halves disagree, with the tolerance shared out by width. Handles integrands
// that are smooth except for steep local features in the interior (for which
// uniform doubling wastes its refinement budget globally). `max_doublings` is
// ignored; recursion depth and total panel count are capped internally.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const Options& opt = {});

// Golden-section maximum of a unimodal function on [a, b].
// Returns the argmax; |returned - true argmax| <= x_tol.
double golden_section_max(const std::function<double(double)>& f, double a, double b,
                          double x_tol);

// Root of a monotone function on a bracketing interval [a, b] with f(a), f(b)
// of opposite sign (or zero); bisection with secant acceleration.
double bracketed_root(const std::function<double(double)>& f, double a, double b,
                      double x_tol);

// Move x float-by-float toward `toward` until margin(x) > 0. Root finders can
// land a turning point a few ulps on the wrong side; singular quadrature needs
// endpoints strictly inside the region where the integrand is defined.
double nudge_inside(const std::function<double(double)>& margin, double x, double toward);

// Options suited to integrands cut off at a near-singular endpoint: the
// endpoint can only be placed to ~1e-14 of the turning point, which floors the
// reachable absolute accuracy near 1e-7 * scale, so demanding much tighter
// panel agreement would never stabilize. The absolute floor matters for
// near-zero integrals (odd numerators over symmetric wells), whose successive
// panel levels differ by the same endpoint-sliver drift of ~1e-12.
inline Options singular_options() {
  Options o;
  o.rel_tol = 1e-9;
  o.abs_tol = 1e-10;
  return o;
}

}  // namespace homokin::quad
