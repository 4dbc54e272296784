#include <cmath>

#include "doctest.h"
#include "homokin/observable.hpp"

using namespace homokin;

TEST_CASE("factory observables evaluate their formulas") {
  CHECK(Observable::coordinate().eval1(0.3, 2.0) == doctest::Approx(0.3));
  CHECK(Observable::momentum().eval1(0.3, 2.0) == doctest::Approx(2.0));
  CHECK(Observable::kinetic().eval1(0.3, 2.0) == doctest::Approx(2.0));
  CHECK(Observable::constant(4.5).eval1(9.0, -1.0) == doctest::Approx(4.5));
  CHECK(Observable::sin_y(2.0).eval1(0.1, 0.0) ==
        doctest::Approx(std::sin(2.0 * M_PI * 2.0 * 0.1)).epsilon(1e-14));
  CHECK(Observable::cos_y(1.0).eval1(0.2, 0.0) ==
        doctest::Approx(std::cos(2.0 * M_PI * 0.2)).epsilon(1e-14));
  CHECK(Observable::speed_band(1.0, 2.0).eval1(0.0, -1.5) == doctest::Approx(1.0));
  CHECK(Observable::speed_band(1.0, 2.0).eval1(0.0, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("kinetic observable sums squared momenta in higher dimension") {
  const double y[2] = {0.0, 0.0}, xi[2] = {1.0, 2.0};
  CHECK(Observable::kinetic()(y, xi) == doctest::Approx(2.5));
  CHECK(Observable::momentum_component(1, 2)(y, xi) == doctest::Approx(2.0));
}

TEST_CASE("arithmetic combinators") {
  const Observable f = Observable::coordinate() + Observable::momentum();
  CHECK(f.eval1(0.25, 1.5) == doctest::Approx(1.75));
  const Observable g = Observable::coordinate() * Observable::momentum();
  CHECK(g.eval1(0.25, 1.5) == doctest::Approx(0.375));
  CHECK(Observable::momentum().scaled(-2.0).eval1(0.0, 3.0) == doctest::Approx(-6.0));
}

TEST_CASE("axis products multiply per-axis factors") {
  const Observable p =
      Observable::axis_product({Observable::coordinate(), Observable::momentum()});
  const double y[2] = {0.5, 9.0}, xi[2] = {7.0, 3.0};
  CHECK(p(y, xi) == doctest::Approx(1.5));
  CHECK(p.dim() == 2);
  const double y1[1] = {0.5}, xi1[1] = {7.0};
  CHECK_THROWS_AS(p(y1, xi1), DimensionMismatch);
}

TEST_CASE("fixed-dimension observables reject mismatched states") {
  const Observable f("probe", 1, [](std::span<const double> y, std::span<const double>) {
    return y[0];
  });
  const double y[2] = {1.0, 2.0}, xi[2] = {0.0, 0.0};
  CHECK_THROWS_AS(f(y, xi), DimensionMismatch);
  CHECK_THROWS_AS(Observable()(y, xi), ValidationError);
}
