#include <cmath>

#include "doctest.h"
#include "homokin/closedform.hpp"
#include "homokin/errors.hpp"
#include "homokin/observable.hpp"
#include "homokin/potential.hpp"
#include "oracles.hpp"

using namespace homokin;

namespace {
const double kTheta0CosWell = 2.0 * std::sqrt(2.0) / M_PI;  // exact for sin^2(pi y)
}

TEST_CASE("flat potential: every closed form collapses to free motion") {
  const Potential u = Potential::constant(0.0);
  CHECK(phi(u, 2.0) == doctest::Approx(2.0).epsilon(1e-12));          // sqrt(2E)
  CHECK(theta0(u) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hbar(u, 1.3) == doctest::Approx(0.5 * 1.3 * 1.3).epsilon(1e-12));
  CHECK(hbar_prime(u, 1.3) == doctest::Approx(1.3).epsilon(1e-10));
  CHECK(xsharp_closed(u, PhasePoint{{0.0}, {-2.0}}) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("phi matches the midpoint-rule harmonic mean of the speed") {
  const Potential u = Potential::cosine_well();
  for (double E : {1.3, 2.0, 4.7}) {
    const double mean_inv_speed = oracle::midpoint_average(
        [&](double y) { return 1.0 / std::sqrt(E - u.value1(y)); }, 0.0, 1.0, 200000);
    CHECK(phi(u, E) == doctest::Approx(std::sqrt(2.0) / mean_inv_speed).epsilon(1e-10));
  }
  CHECK(phi(u, 0.5) == 0.0);  // below the ceiling the mean drift vanishes
  CHECK_THROWS_AS(phi(u, 1.0), CriticalEnergyError);
}

TEST_CASE("phi is increasing and below the free-motion speed") {
  const Potential u = Potential::cosine_well();
  double prev = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double E = 1.2 + i * 0.5;
    const double v = phi(u, E);
    CHECK(v > prev);
    CHECK(v < std::sqrt(2.0 * E));
    prev = v;
  }
}

TEST_CASE("momentum threshold of the flat segment is exact on the cosine well") {
  CHECK(theta0(Potential::cosine_well()) == doctest::Approx(kTheta0CosWell).epsilon(1e-10));
}

TEST_CASE("effective Hamiltonian: flat piece, inversion, convexity") {
  const Potential u = Potential::cosine_well();
  CHECK(hbar(u, 0.0) == 1.0);
  CHECK(hbar(u, kTheta0CosWell - 1e-9) == 1.0);  // exactly the ceiling on the flat piece
  CHECK(hbar(u, -0.3) == 1.0);

  // above the threshold, hbar inverts theta: theta(2 (hbar(p) - ceiling)) = p
  for (double p : {1.0, 1.7, 2.6}) {
    const double lambda = 2.0 * (hbar(u, p) - 1.0);
    const double theta_ref = oracle::midpoint_average(
        [&](double y) { return std::sqrt(2.0 * (1.0 - u.value1(y)) + lambda); }, 0.0, 1.0,
        200000);
    CHECK(theta_ref == doctest::Approx(p).epsilon(1e-9));
  }

  // convexity via second differences across the kink
  double prev2 = hbar(u, 0.0), prev1 = hbar(u, 0.05);
  for (int i = 2; i <= 60; ++i) {
    const double cur = hbar(u, 0.05 * i);
    CHECK(cur - 2.0 * prev1 + prev2 >= -1e-9);
    prev2 = prev1;
    prev1 = cur;
  }

  // derivative: zero on the flat piece, sign(p) phi(hbar(p)) beyond it
  CHECK(hbar_prime(u, 0.4) == 0.0);
  for (double p : {1.2, 2.1}) {
    CHECK(hbar_prime(u, p) == doctest::Approx(phi(u, hbar(u, p))).epsilon(1e-9));
    CHECK(hbar_prime(u, -p) == doctest::Approx(-phi(u, hbar(u, p))).epsilon(1e-9));
  }
  CHECK_THROWS_AS(hbar_prime(u, kTheta0CosWell), KinkError);
}

TEST_CASE("momentum label round trip") {
  const Potential u = Potential::cosine_well();
  for (double xi : {1.5, 2.0, -3.0}) {
    const PhasePoint s{{0.2}, {xi}};
    const double E = 0.5 * xi * xi + u.value1(0.2);
    const double p = p_of_state(u, s);
    CHECK(hbar(u, p) == doctest::Approx(E).epsilon(1e-9));
    CHECK(std::signbit(p) == std::signbit(xi));
  }
  CHECK_THROWS_AS(p_of_state(u, PhasePoint{{0.0}, {0.5}}), EnergyBelowCritical);
}

TEST_CASE("running projection matches the midpoint-weighted cell average") {
  const Potential u = Potential::cosine_well();
  const Observable F = Observable::cos_y(1.0);
  for (double E : {1.5, 2.0, 5.0}) {
    auto w = [&](double y) { return 1.0 / std::sqrt(E - u.value1(y)); };
    const double num = oracle::midpoint_average(
        [&](double y) { return std::cos(2.0 * M_PI * y) * w(y); }, 0.0, 1.0, 200000);
    const double den = oracle::midpoint_average(w, 0.0, 1.0, 200000);
    CHECK(project_running(u, F, E, 1.0) == doctest::Approx(num / den).epsilon(1e-9));
  }
  CHECK_THROWS_AS(project_running(u, F, 0.5, 1.0), CriticalEnergyError);
}

TEST_CASE("trapped projection matches the Gauss-Chebyshev well average") {
  const Potential u = Potential::cosine_well();
  const Observable F = Observable::cos_y(1.0);
  const double E = 0.5;
  const Well w = u.well_containing(0.0, E);
  const double ref = oracle::trapped_mean([&](double y) { return u.value1(y); },
                                          [](double y) { return std::cos(2.0 * M_PI * y); }, E,
                                          w.lo, w.hi, 4000);
  CHECK(project_trapped(u, F, E, 0.0) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("state dispatch uses the orbit class") {
  const Potential u = Potential::cosine_well();
  const Observable F = Observable::cos_y(1.0);
  CHECK(project_state(u, F, PhasePoint{{0.0}, {2.0}}) ==
        doctest::Approx(project_running(u, F, 2.0, 1.0)).epsilon(1e-12));
  CHECK(project_state(u, F, PhasePoint{{0.0}, {1.0}}) ==
        doctest::Approx(project_trapped(u, F, 0.5, 0.0)).epsilon(1e-12));
  CHECK_THROWS_AS(project_state(u, F, PhasePoint{{0.0}, {std::sqrt(2.0)}}),
                  CriticalEnergyError);
  CHECK(xsharp_closed(u, PhasePoint{{0.0}, {1.0}}) == 0.0);  // trapped states do not drift
}

TEST_CASE("Lagrangian dual pairs with the effective Hamiltonian") {
  const Potential u = Potential::cosine_well();
  // at v = 0 the dual is -min hbar = -ceiling
  CHECK(lagrangian_dual(u, 0.0).value == doctest::Approx(-1.0).epsilon(1e-9));
  // Fenchel-Young equality along the gradient: dual(hbar'(p)) = p hbar'(p) - hbar(p)
  for (double p : {1.4, 2.2}) {
    const double v = hbar_prime(u, p);
    const DualPoint d = lagrangian_dual(u, v);
    CHECK(d.value == doctest::Approx(p * v - hbar(u, p)).epsilon(1e-8));
    CHECK(d.argmax == doctest::Approx(p).epsilon(1e-5));
  }
  const IdentityPair pair = lagrangian_identity_check(u, 0.0, 2.0);
  CHECK(pair.lhs == doctest::Approx(pair.rhs).epsilon(1e-7));
}

TEST_CASE("corrector profile is odd, anchored at zero, and sublinear") {
  const Potential u = Potential::cosine_well();
  const CorrectorProfile narrow = corrector_profile(u, 2.0, 256, 10.5);
  const CorrectorProfile wide = corrector_profile(u, 2.0, 256, 40.5);
  const size_t n = narrow.y.size();  // even count requested, grid holds the midpoint too
  REQUIRE(n == 257);
  CHECK_THROWS_AS(corrector_profile(u, 2.0, 255, 10.5), ValidationError);
  CHECK(narrow.y.front() == doctest::Approx(-10.5));
  CHECK(narrow.y.back() == doctest::Approx(10.5));
  CHECK(std::fabs(narrow.w[n / 2]) < 1e-12);  // w(0) = 0
  for (size_t i = 0; i < 20; ++i)
    CHECK(narrow.w[i] == doctest::Approx(-narrow.w[n - 1 - i]).epsilon(1e-8));
  CHECK(wide.sublinearity_ratio < narrow.sublinearity_ratio);
}

TEST_CASE("effective quantities survive near-touches in a long random window") {
  // a quasi-periodic field approaches its analytic sup inside the window
  // without attaining it; the sqrt integrands develop steep interior dips
  // there, which the averaging must absorb
  const Potential u = RandomPhaseModel::standard().realize(7);
  const double t0 = theta0(u);
  CHECK(t0 > 0.0);
  CHECK(t0 < std::sqrt(2.0 * u.u_max()));  // mean speed below the peak speed
  const CorrectorProfile w = corrector_profile(u, 2.0, 256, 1e2);
  CHECK(w.sublinearity_ratio > 0.0);
  CHECK(w.sublinearity_ratio < 1e-2);
  CHECK(hbar(u, 2.0) > u.u_max());
}
