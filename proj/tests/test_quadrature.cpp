#include <cmath>

#include "doctest.h"
#include "homokin/quadrature.hpp"
#include "oracles.hpp"

using namespace homokin;

TEST_CASE("panel integration reproduces elementary integrals") {
  quad::Options opt;
  CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, M_PI, opt) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(quad::integrate([](double x) { return x * x; }, -1.0, 2.0, opt) ==
        doctest::Approx(3.0).epsilon(1e-12));
  // odd integrand over a symmetric interval: near-zero result must converge,
  // not fight the absolute floor
  CHECK(std::fabs(quad::integrate([](double x) { return x * std::exp(x * x); }, -2.0, 2.0,
                                  opt)) < 1e-9);
}

TEST_CASE("endpoint-singular integration matches Gauss-Chebyshev") {
  // integral_0^1 dy / sqrt(y (1-y)) = pi
  const double v = quad::integrate_singular([](double y) { return 1.0 / std::sqrt(y * (1.0 - y)); },
                                            0.0, 1.0, true, true, quad::singular_options());
  CHECK(v == doctest::Approx(M_PI).epsilon(1e-9));

  // a lumpier integrand, cross-checked against the Chebyshev-weighted rule
  auto g = [](double y) { return std::exp(y) * (2.0 + std::sin(3.0 * y)); };
  const double lib = quad::integrate_singular(
      [&](double y) { return g(y) / std::sqrt((y - 0.2) * (1.7 - y)); }, 0.2, 1.7, true, true,
      quad::singular_options());
  const double ref = oracle::gauss_chebyshev(g, 0.2, 1.7, 2000);
  CHECK(lib == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("golden section finds interior maxima") {
  const double x = quad::golden_section_max([](double t) { return -(t - 0.37) * (t - 0.37); },
                                            0.0, 1.0, 1e-12);
  CHECK(x == doctest::Approx(0.37).epsilon(1e-8));
}

TEST_CASE("bracketed root solves cos(x) = 0") {
  const double r = quad::bracketed_root([](double x) { return std::cos(x); }, 0.0, 2.0, 1e-14);
  CHECK(r == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("nudge_inside moves onto the positive side of the margin") {
  auto margin = [](double x) { return x - 1.0; };  // root at 1, inside is x > 1
  const double x = quad::nudge_inside(margin, 1.0, 2.0);
  CHECK(margin(x) > 0.0);
  CHECK(x - 1.0 < 1e-9);  // stays within a whisker of the endpoint
  // already-interior points are returned unchanged
  CHECK(quad::nudge_inside(margin, 1.5, 2.0) == 1.5);
}

TEST_CASE("locally adaptive integration resolves a steep interior feature") {
  // sqrt(y^2 + d^2) with tiny d: smooth everywhere but with curvature 1/d at
  // the origin, which defeats uniform panel doubling at tight tolerances
  const double d = 1e-8;
  auto f = [d](double y) { return std::sqrt(y * y + d * d); };
  const double exact = std::sqrt(1.0 + d * d) + d * d * std::asinh(1.0 / d);
  quad::Options opt;
  opt.rel_tol = 1e-12;
  CHECK(quad::integrate_adaptive(f, -1.0, 1.0, opt) == doctest::Approx(exact).epsilon(1e-12));
  // smooth integrands agree with the uniform-doubling result
  auto g = [](double y) { return std::exp(y) * std::cos(3.0 * y); };
  CHECK(quad::integrate_adaptive(g, 0.0, 2.0) ==
        doctest::Approx(quad::integrate(g, 0.0, 2.0)).epsilon(1e-13));
  CHECK(quad::integrate_adaptive(g, 1.0, 1.0) == 0.0);
}
