#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "homokin/errors.hpp"

namespace homokin {

// One mode of a trigonometric potential: amplitude * cos(2 pi wavenumber y + phase).
// Periodic kinds require integer wavenumber >= 1 (unit cell); random-phase
// realizations may carry real wavenumbers > 0.
struct FourierTerm {
  double amplitude = 0.0;
  double wavenumber = 1.0;
  double phase = 0.0;
};

enum class PotentialKind { Constant, Periodic1D, RandomPhase1D, HarmonicWell1D, SeparableND };

const char* kind_name(PotentialKind k);

// Weight applied to potential values by cell/window averaging.
struct WeightFunctional {
  std::function<double(double)> w;     // of the potential value u(s)
  bool inverse_sqrt_singular = false;  // w blows up like (E - u)^(-1/2) as u -> E
  double energy = 0.0;                 // the E above; read only when the flag is set
};

// Maximal interval around an anchor on which u < E, with u = E at both ends.
struct Well {
  double lo = 0.0;
  double hi = 0.0;
};

// Immutable potential model: finite trigonometric sums (periodic or seeded
// random-phase), an explicit piecewise harmonic well, a constant, or a
// separable sum of 1-D components. Values are normalized so u >= 0 with
// inf u = 0, and u <= u_max().
class Potential {
 public:
  static Potential constant(double value);
  static Potential periodic1d(std::vector<FourierTerm> terms);
  // u(y) = (1 - cos(2 pi y)) / 2: single term amp 1/2, wavenumber 1, phase pi.
  static Potential cosine_well();
  // Quadratic r^2 for |r| <= half_width on the centered unit cell, continued
  // by a monotone cubic rising by cap_rise toward the cell edge; C^1, period 1.
  static Potential harmonic_well(double half_width = 0.25, double cap_rise = 0.1);
  static Potential separable(std::vector<Potential> axes);

  PotentialKind kind() const { return kind_; }
  int dim() const { return kind_ == PotentialKind::SeparableND ? static_cast<int>(axes_.size()) : 1; }

  double value1(double y) const;   // 1-D kinds only
  double deriv1(double y) const;   // 1-D kinds only
  double value(std::span<const double> y) const;
  void gradient(std::span<const double> y, std::span<double> out) const;

  double u_max() const { return u_max_; }
  // sup |u''|; for separable potentials the max over axes (dynamics decouple).
  double second_derivative_bound() const;

  // Length of the averaging domain [0, L]: 1 for cell-periodic kinds, the
  // configured window for random-phase realizations.
  double domain_length() const;

  // Max of u over n uniform samples of the averaging domain, polished by local
  // search; a lower bound on the true sup that tightens as n grows.
  double grid_supremum(int n) const;

  // Average of w(u(s)) over the domain. Singular weights with E > u_max are
  // smooth and integrated directly; with E <= u_max the average runs over the
  // sub-level set {u < E} (sum of wells), and throws NoRunningRegion when that
  // set is empty.
  double cell_average(const WeightFunctional& w) const;

  // (1/L) * integral of f(s) over the averaging domain, f smooth.
  double average_position(const std::function<double(double)>& f) const;

  // Points of the averaging domain where u attains u_max (1-D kinds; empty for
  // Constant and random-phase kinds, where no interior touch point exists).
  std::vector<double> interior_maxima() const;

  // Maximal interval around y with u < E; throws WellNotFound if u(y) >= E or
  // no turning point brackets within the search range.
  Well well_containing(double y, double E) const;

  // Same field translated by z: shifted(z).value1(y) == value1(y + z) up to
  // roundoff. Trigonometric kinds only (phase shift rule).
  Potential shifted(double z) const;

  const std::vector<FourierTerm>& terms() const { return terms_; }
  const std::vector<Potential>& axes() const { return axes_; }
  double offset() const { return offset_; }
  bool has_seed() const { return has_seed_; }
  std::uint64_t seed() const { return seed_; }
  double window() const { return window_; }
  double harmonic_half_width() const { return well_half_width_; }
  double harmonic_cap_rise() const { return cap_rise_; }

 private:
  Potential() = default;
  friend struct RandomPhaseModel;

  void finalize_trig();  // offset/u_max/deriv bound for trig kinds

  PotentialKind kind_ = PotentialKind::Constant;
  std::vector<FourierTerm> terms_;
  std::vector<Potential> axes_;
  double offset_ = 0.0;
  double u_max_ = 0.0;
  double d2_bound_ = 0.0;
  double window_ = 1.0;
  bool exact_sup_ = false;  // single-term trig: offset and u_max are analytic
  bool has_seed_ = false;
  std::uint64_t seed_ = 0;
  double well_half_width_ = 0.0;
  double cap_rise_ = 0.0;
};

// A stationary random field model: modes with fixed amplitudes/wavenumbers and
// phases drawn i.i.d. uniform on [0, 2 pi) per seed.
struct RandomPhaseMode {
  double amplitude = 0.0;
  double wavenumber = 1.0;
};

struct RandomPhaseModel {
  std::vector<RandomPhaseMode> modes;
  double window = 1e4;  // spatial averaging window length

  Potential realize(std::uint64_t seed) const;
  // Ensemble mean of u(y): the offset (each cosine averages to zero in phase).
  double mean_value() const;
  // Analytic sup over the line: offset + sum of amplitudes = 2 * sum |amp|.
  double sup_bound() const;

  // Two modes, amplitudes (0.3, 0.2), rationally independent wavenumbers
  // sqrt(2) and sqrt(5); ergodic shift action.
  static RandomPhaseModel standard();
};

}  // namespace homokin
