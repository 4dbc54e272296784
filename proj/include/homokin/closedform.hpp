#pragma once

#include <vector>

#include "homokin/dynamics.hpp"
#include "homokin/observable.hpp"
#include "homokin/parallel.hpp"
#include "homokin/potential.hpp"

namespace homokin {

// One-dimensional closed forms for the averaged dynamics. Everything here is
// expressed through spatial averages over the potential's cell (or window),
// so the flow itself never enters; tests compare these against trajectory
// statistics computed independently.

// Half-width of the excluded energy band around the ceiling, where periods
// and weights diverge.
inline double critical_band(const Potential& u, double band_rel = 1e-3) {
  return band_rel * u.u_max();
}

// Mean drift speed at energy E: zero below the potential ceiling, the
// harmonic-type average sqrt(2) / <(E - u)^(-1/2)> above it. Energies within
// the critical band of the ceiling are rejected.
double phi(const Potential& u, double E, double band_rel = 1e-3);

// theta(lambda) = <sqrt(2 (ceiling - u) + lambda)>. Increasing and concave;
// theta(0) is the momentum threshold of the flat segment below.
double theta(const Potential& u, double lambda);
double theta0(const Potential& u);
// d theta / d lambda = <(2 (ceiling - u) + lambda)^(-1/2)> / 2, lambda > 0.
double theta_prime(const Potential& u, double lambda);

// Effective Hamiltonian: ceiling for |p| <= theta(0), else
// ceiling + lambda/2 where theta(lambda) = |p|.
double hbar(const Potential& u, double p);

// Derivative of hbar: zero on the flat segment, sign(p)/(2 theta'(lambda))
// beyond it. Throws KinkError within kink_tol of the segment edge (where the
// one-sided derivative degenerates), unless the flat segment has zero width.
double hbar_prime(const Potential& u, double p, double kink_tol = 1e-9);

// Momentum label of a running state: sign(xi) * theta(2 (E - ceiling)).
// Throws EnergyBelowCritical for states at or below the ceiling. The label
// inverts hbar: hbar(p_of_state(s)) returns the state's energy.
double p_of_state(const Potential& u, const PhasePoint& s);

// Long-time mean velocity of a running state: sign(xi) * phi(E).
double xsharp_closed(const Potential& u, const PhasePoint& s);

// Orbit average of an observable at energy E on the running branch with
// momentum sign sigma: weight each position by the time spent there.
double project_running(const Potential& u, const Observable& F, double E, double sigma,
                       double band_rel = 1e-3);

// Orbit average over the trapped orbit at energy E in the well containing
// y_anchor: both momentum branches, weighted by inverse speed.
double project_trapped(const Potential& u, const Observable& F, double E, double y_anchor,
                       double band_rel = 1e-3);

// Dispatch on the orbit class of s. Near-critical states throw
// CriticalEnergyError; multi-dimensional states are not handled here.
double project_state(const Potential& u, const Observable& F, const PhasePoint& s,
                     double band_rel = 1e-3);

// Convex dual of hbar at velocity v: sup_q (q v - hbar(q)), found by
// golden-section over a bracket grown until the slope exceeds |v|.
struct DualPoint {
  double value = 0.0;   // the supremum
  double argmax = 0.0;  // maximizing momentum (sign matches v)
};
DualPoint lagrangian_dual(const Potential& u, double v);

// Both sides of the identity "orbit average of the Lagrangian equals the
// convex dual at the drift speed", computed through deliberately separate
// code paths so their agreement is a genuine cross-check.
struct IdentityPair {
  double lhs = 0.0;  // projection of |xi|^2/2 - u along the running orbit
  double rhs = 0.0;  // dual of hbar at the closed-form drift speed
};
IdentityPair lagrangian_identity_check(const Potential& u, double y, double xi);

// Sampled corrector profile at momentum label p (|p| above the flat segment):
// w(y) = sign(p) * integral_0^y sqrt(2 (hbar(p) - u)) - p y on a symmetric
// grid over [-span, span]. Grows sublinearly; sublinearity_ratio is
// max |w(y)| / (1 + |y|) over the outer half, which must fall as span grows.
struct CorrectorProfile {
  std::vector<double> y;
  std::vector<double> w;
  double span = 0.0;
  double sublinearity_ratio = 0.0;
};
CorrectorProfile corrector_profile(const Potential& u, double p, int n_points, double span);

// phi sampled on a uniform energy grid; rows are independent, so the parallel
// mode splits them across threads with identical per-row results. Grid points
// inside the critical band are rejected up front.
struct EffectiveVelocityTable {
  std::vector<double> energies;
  std::vector<double> phi_values;
};
EffectiveVelocityTable phi_table(const Potential& u, double e_lo, double e_hi, int n,
                                 par::Exec mode = par::Exec::Serial);

}  // namespace homokin
