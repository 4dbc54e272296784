#include <cmath>
#include <random>

#include "doctest.h"
#include "homokin/dynamics.hpp"
#include "homokin/potential.hpp"
#include "oracles.hpp"

using namespace homokin;

namespace {
PhasePoint state1(double y, double xi) { return PhasePoint{{y}, {xi}}; }
}  // namespace

TEST_CASE("zero potential gives straight-line transport y(t) = y0 - t xi") {
  const Potential u = Potential::constant(0.0);
  const PhasePoint end = endpoint(u, state1(0.3, 1.7), 1e-3, 2000);  // T = 2
  CHECK(end.y[0] == doctest::Approx(0.3 - 2.0 * 1.7).epsilon(1e-12));
  CHECK(end.xi[0] == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("splitting flow matches an independent RK4 integration") {
  const Potential u = Potential::cosine_well();
  auto du = [&](double y) { return u.deriv1(y); };
  const PhasePoint lib = endpoint(u, state1(0.2, 1.7), 1e-4, 30000);  // T = 3
  const oracle::State ref = oracle::rk4_flow(du, {0.2, 1.7}, 3.0, 60000);
  // splitting carries its own O(h^2) phase error; the RK4 reference is far tighter
  CHECK(lib.y[0] == doctest::Approx(ref.y).epsilon(5e-7));
  CHECK(lib.xi[0] == doctest::Approx(ref.xi).epsilon(5e-7));
}

TEST_CASE("energy drift is second order in the step") {
  const Potential u = Potential::cosine_well();
  PhasePoint a = state1(0.0, 2.0), b = state1(0.0, 2.0);
  const double drift_h = walk(u, a, 1e-3, 100000, [](double, const PhasePoint&) {});
  const double drift_h2 = walk(u, b, 5e-4, 200000, [](double, const PhasePoint&) {});
  CHECK(drift_h < 1e-6);
  CHECK(drift_h / drift_h2 > 3.5);
}

TEST_CASE("flow is time reversible under momentum flip") {
  const Potential u = Potential::cosine_well();
  PhasePoint s = endpoint(u, state1(0.1, 1.4), 1e-3, 5000);
  s.xi[0] = -s.xi[0];
  PhasePoint back = endpoint(u, s, 1e-3, 5000);
  back.xi[0] = -back.xi[0];
  CHECK(back.y[0] == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(back.xi[0] == doctest::Approx(1.4).epsilon(1e-10));
}

TEST_CASE("steps above the stability limit are rejected") {
  const Potential u = Potential::cosine_well();
  const double h_max = stability_limit(u);
  CHECK(h_max == doctest::Approx(2.0 / std::sqrt(u.second_derivative_bound())).epsilon(1e-12));
  PhasePoint s = state1(0.0, 2.0);
  CHECK_THROWS_AS(walk(u, s, 1.01 * h_max, 10, [](double, const PhasePoint&) {}),
                  StepSizeError);
}

TEST_CASE("orbit classification splits at the potential ceiling") {
  const Potential u = Potential::cosine_well();
  CHECK(classify(u, state1(0.0, 2.0)) == OrbitClass::Running);     // E = 2
  CHECK(classify(u, state1(0.0, 0.5)) == OrbitClass::Trapped);     // E = 0.125
  const double xi_crit = std::sqrt(2.0);                           // E = 1 = u_max
  CHECK(classify(u, state1(0.0, xi_crit)) == OrbitClass::NearCritical);
}

TEST_CASE("periods match first-return times of an RK4 orbit") {
  const Potential u = Potential::cosine_well();
  auto du = [&](double y) { return u.deriv1(y); };

  // trapped at E = 0.5: start at the well bottom with all-kinetic energy
  const double lib_trapped = period_1d(u, 0.5);
  const double ref_trapped = oracle::rk4_trapped_period(du, {0.0, 1.0}, 1e-5, 400000);
  CHECK(lib_trapped == doctest::Approx(ref_trapped).epsilon(1e-7));

  // running at E = 2: one cell crossing
  const double lib_running = period_1d(u, 2.0);
  const double ref_running = oracle::rk4_running_period(du, {0.0, 2.0}, 1.0, 1e-5, 400000);
  CHECK(lib_running == doctest::Approx(ref_running).epsilon(1e-7));

  // free motion crosses the unit cell in 1/|xi|
  CHECK(period_1d(Potential::constant(0.0), 2.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("flow Jacobian has unit determinant") {
  const Potential u = Potential::cosine_well();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uy(-0.5, 0.5), uxi(1.2, 2.5);
  for (int k = 0; k < 3; ++k) {
    const double det = liouville_determinant(u, state1(uy(rng), uxi(rng)), 1e-3, 2000);
    CHECK(det == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("separable dynamics decouple into per-axis flows") {
  const Potential ux = Potential::cosine_well();
  const Potential uh = Potential::harmonic_well();
  const Potential u2 = Potential::separable({ux, uh});
  const PhasePoint joint = endpoint(u2, PhasePoint{{0.1, 0.05}, {1.5, 0.3}}, 1e-3, 4000);
  const PhasePoint ax = endpoint(ux, state1(0.1, 1.5), 1e-3, 4000);
  const PhasePoint ah = endpoint(uh, state1(0.05, 0.3), 1e-3, 4000);
  CHECK(joint.y[0] == doctest::Approx(ax.y[0]).epsilon(1e-12));
  CHECK(joint.xi[0] == doctest::Approx(ax.xi[0]).epsilon(1e-12));
  CHECK(joint.y[1] == doctest::Approx(ah.y[0]).epsilon(1e-12));
  CHECK(joint.xi[1] == doctest::Approx(ah.xi[0]).epsilon(1e-12));
}

TEST_CASE("scaled flow reports the macroscopic image of the cell flow") {
  const Potential u = Potential::cosine_well();
  const double eps = 0.05, t = 0.4, x = 0.31, xi = 1.3;
  const PhasePoint cell = cell_flow(u, eps, t, state1(x, xi));
  const PhasePoint scaled = scaled_flow(u, eps, t, state1(x, xi));
  CHECK(scaled.y[0] == doctest::Approx(eps * cell.y[0]).epsilon(1e-12));
  CHECK(scaled.xi[0] == doctest::Approx(cell.xi[0]).epsilon(1e-12));

  // zero potential: the cell image is x/eps - (t/eps) xi, so eps*Y = x - t*xi
  const PhasePoint free = scaled_flow(Potential::constant(0.0), eps, t, state1(x, xi));
  CHECK(free.y[0] == doctest::Approx(x - t * xi).epsilon(1e-10));
}

TEST_CASE("trajectory recording matches walk drift bookkeeping") {
  const Potential u = Potential::cosine_well();
  const Trajectory tr = integrate_time(u, state1(0.0, 2.0), 5.0, 1e-3, 100);
  PhasePoint s = state1(0.0, 2.0);
  const double drift = walk(u, s, 1e-3, steps_for(5.0, 1e-3), [](double, const PhasePoint&) {});
  CHECK(tr.max_energy_drift == doctest::Approx(drift).epsilon(1e-15));
  CHECK(tr.times.back() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(tr.states.back().y[0] == doctest::Approx(s.y[0]).epsilon(1e-15));
}
