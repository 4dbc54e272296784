#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "homokin/errors.hpp"
#include "homokin/potential.hpp"

namespace homokin {

// State of one characteristic: position y and momentum xi, same dimension.
struct PhasePoint {
  std::vector<double> y;
  std::vector<double> xi;

  PhasePoint() = default;
  PhasePoint(double y0, double xi0) : y{y0}, xi{xi0} {}
  PhasePoint(std::vector<double> y0, std::vector<double> xi0)
      : y(std::move(y0)), xi(std::move(xi0)) {
    if (y.size() != xi.size()) throw DimensionMismatch("phase point components differ in size");
  }
  int dim() const { return static_cast<int>(y.size()); }
};

enum class OrbitClass { Trapped, Running, NearCritical };
const char* orbit_class_name(OrbitClass c);

// Total energy |xi|^2/2 + u(y); conserved along exact characteristics.
double hamiltonian(const Potential& u, const PhasePoint& s);

// Classify by energy against the potential ceiling: below -> trapped orbit,
// above -> unbounded drift. Within a relative band of the ceiling the period
// blows up and time averages converge too slowly to trust.
OrbitClass classify(const Potential& u, const PhasePoint& s, double band_rel = 1e-3);

// Largest stable step for the splitting scheme given the curvature bound.
double stability_limit(const Potential& u);

struct Trajectory {
  double step = 0.0;
  long stride = 1;
  double energy0 = 0.0;
  std::vector<double> times;
  std::vector<PhasePoint> states;
  double max_energy_drift = 0.0;  // max_t |H(t) - H(0)| over every computed step
};

// Fixed-step time-reversible splitting of second order. The momentum moves
// toward falling potential: dy/dt = -xi, dxi/dt = +grad u(y).
class Stepper {
 public:
  Stepper(const Potential& u, double step);
  void advance(PhasePoint& s) const;          // one step forward
  void advance_back(PhasePoint& s) const;     // one step of the reversed scheme
  double step() const { return h_; }

 private:
  const Potential* u_;
  double h_;
  mutable std::vector<double> grad_;
};

// Number of fixed steps covering duration T at step h (at least one).
inline long steps_for(double T, double h) {
  if (!(T > 0.0) || !(h > 0.0)) throw ValidationError("duration and step must be positive");
  long n = std::lround(T / h);
  return n < 1 ? 1 : n;
}

// Integrate for n_steps, recording every `stride`-th state (the final state is
// always recorded). Throws StepSizeError above the stability limit.
Trajectory integrate(const Potential& u, const PhasePoint& start, double step, long n_steps,
                     long stride = 1);
// Duration flavor: runs round(T/h) steps.
Trajectory integrate_time(const Potential& u, const PhasePoint& start, double T, double h,
                          long stride = 1);

// Integrate and hand each step to `visit(t, state)` without storing anything.
// Returns the running maximum of |H(t) - H(0)|.
double walk(const Potential& u, PhasePoint& s, double step, long n_steps,
            const std::function<void(double, const PhasePoint&)>& visit);

// Final state only.
PhasePoint endpoint(const Potential& u, const PhasePoint& start, double step, long n_steps);

// Orbit period at energy E. Trapped energies (E below the ceiling) oscillate
// between the turning points of the well containing y_anchor; running
// energies cross one spatial period. Energies within the critical band of the
// ceiling have no usable period.
double period_1d(const Potential& u, double E, double y_anchor = 0.0, double band_rel = 1e-3);

// Determinant of the flow Jacobian d(Y,Xi)/d(y,xi) after time T, by central
// differences; the exact flow preserves phase-space volume.
double liouville_determinant(const Potential& u, const PhasePoint& start, double step,
                             long n_steps, double fd_eps = 1e-6);

// Cell-scale flow image T_{t/eps}(x/eps, xi): position stays in cell units.
PhasePoint cell_flow(const Potential& u, double eps, double t, const PhasePoint& macro_start,
                     double cell_step = 1e-3);

// Two-scale flow: follow the cell dynamics from (x/eps, xi) for time t/eps and
// report (eps * Y, Xi) — the macroscopic position and the cell momentum.
PhasePoint scaled_flow(const Potential& u, double eps, double t, const PhasePoint& macro_start,
                       double cell_step = 1e-3);

}  // namespace homokin
