#include <cmath>

#include "doctest.h"
#include "homokin/ergodic.hpp"
#include "homokin/errors.hpp"
#include "homokin/potential.hpp"
#include "oracles.hpp"

using namespace homokin;

namespace {
PhasePoint state1(double y, double xi) { return PhasePoint{{y}, {xi}}; }
}  // namespace

TEST_CASE("time averages on a flat potential are exact") {
  const Potential u = Potential::constant(0.0);
  const ErgodicEstimate est =
      time_average(u, Observable::kinetic(), state1(0.0, 1.5), 50.0, 1e-3);
  CHECK(est.value == doctest::Approx(0.5 * 1.5 * 1.5).epsilon(1e-12));
  CHECK(est.tail_variation < 1e-12);
  CHECK(est.window_means.size() == 4);
}

TEST_CASE("time average matches an RK4 trapezoid oracle") {
  const Potential u = Potential::cosine_well();
  auto du = [&](double y) { return u.deriv1(y); };
  const Observable F = Observable::cos_y(1.0);
  const ErgodicEstimate lib = time_average(u, F, state1(0.0, 2.0), 200.0, 1e-3);
  const double ref = oracle::rk4_time_average(
      du, [](double y, double) { return std::cos(2.0 * M_PI * y); }, {0.0, 2.0}, 200.0,
      400000);
  CHECK(lib.value == doctest::Approx(ref).epsilon(5e-6));
}

TEST_CASE("mean drift estimate is invariant along the orbit") {
  const Potential u = Potential::cosine_well();
  const ErgodicEstimate a = xsharp_empirical(u, state1(0.0, 2.0), 2000.0, 1e-3);
  const PhasePoint later = endpoint(u, state1(0.0, 2.0), 1e-3, 17000);
  const ErgodicEstimate b = xsharp_empirical(u, later, 2000.0, 1e-3);
  CHECK(a.value == doctest::Approx(b.value).epsilon(5e-3));
  // endpoint and quadrature accumulations agree on the same discrete orbit
  CHECK(xsharp_quadrature(u, state1(0.0, 2.0), 500.0, 1e-3) ==
        doctest::Approx(xsharp_empirical(u, state1(0.0, 2.0), 500.0, 1e-3).value)
            .epsilon(1e-8));
}

TEST_CASE("projection defect averages to zero along the flow") {
  const Potential u = Potential::cosine_well();
  const Observable defect = defect_observable(u, Observable::cos_y(1.0));
  const ErgodicEstimate est = time_average(u, defect, state1(0.0, 2.0), 1000.0, 1e-3);
  CHECK(std::fabs(est.value) < 1e-4);
  CHECK(std::fabs(est.value) <= 3.0 * est.tail_variation + 1e-6);
}

TEST_CASE("ball averaging with zero radius reproduces the single orbit") {
  const Potential u = Potential::cosine_well();
  const Observable F = Observable::cos_y(1.0);
  const ErgodicEstimate point = project_empirical(u, F, state1(0.0, 2.0), 300.0, 1e-3);
  const ErgodicEstimate ball0 =
      project_empirical(u, F, state1(0.0, 2.0), 300.0, 1e-3, 0.0, 8, 3);
  CHECK(point.value == ball0.value);
  // a small ball stays near the single-orbit value on a smooth shell
  const ErgodicEstimate ball =
      project_empirical(u, F, state1(0.0, 2.0), 300.0, 1e-3, 0.02, 8, 3);
  CHECK(ball.value == doctest::Approx(point.value).epsilon(0.05));
}

TEST_CASE("ensemble projection reports stable per-seed statistics") {
  const RandomPhaseModel model = RandomPhaseModel::standard();
  const EnsembleStats s =
      ensemble_project(model, Observable::momentum(), 2.0, 300.0, 1e-3, 5, 6);
  CHECK(s.n_used == 6);
  CHECK(s.per_seed.size() == 6);
  CHECK(s.std_error > 0.0);
  double mean = 0.0;
  for (double v : s.per_seed) mean += v;
  CHECK(s.mean == doctest::Approx(mean / 6.0).epsilon(1e-14));
  // rerunning with the same seed base is deterministic
  const EnsembleStats t =
      ensemble_project(model, Observable::momentum(), 2.0, 300.0, 1e-3, 5, 6);
  CHECK(s.mean == t.mean);
}

TEST_CASE("ensemble drift gap shrinks toward zero at high energy") {
  const RandomPhaseModel model = RandomPhaseModel::standard();
  const EnsembleStats gap = ensemble_drift_gap(model, 2.0, 1000.0, 5e-3, 3, 6);
  CHECK(gap.n_used == 6);
  CHECK(std::fabs(gap.mean) <= 5.0 * gap.std_error + 1e-4);
}
