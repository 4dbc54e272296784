#include "homokin/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "homokin/quadrature.hpp"

namespace homokin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double trig_raw_value(const std::vector<FourierTerm>& terms, double y) {
  double v = 0.0;
  for (const FourierTerm& t : terms) v += t.amplitude * std::cos(kTwoPi * t.wavenumber * y + t.phase);
  return v;
}

double trig_raw_deriv(const std::vector<FourierTerm>& terms, double y) {
  double v = 0.0;
  for (const FourierTerm& t : terms)
    v -= t.amplitude * kTwoPi * t.wavenumber * std::sin(kTwoPi * t.wavenumber * y + t.phase);
  return v;
}

int scan_points_per_unit(const std::vector<FourierTerm>& terms) {
  double kmax = 1.0;
  for (const FourierTerm& t : terms) kmax = std::max(kmax, std::fabs(t.wavenumber));
  return 512 * static_cast<int>(std::ceil(kmax));
}

// Monotone cubic from (0, v0) with slope m0 to (1, v1) with slope 0,
// evaluated with derivatives; arguments scaled by the caller.
struct HermiteCap {
  double v0, m0, v1, width;
  double value(double t) const {
    const double t2 = t * t, t3 = t2 * t;
    return v0 * (2 * t3 - 3 * t2 + 1) + width * m0 * (t3 - 2 * t2 + t) + v1 * (-2 * t3 + 3 * t2);
  }
  double deriv_t(double t) const {
    const double t2 = t * t;
    return v0 * (6 * t2 - 6 * t) + width * m0 * (3 * t2 - 4 * t + 1) + v1 * (-6 * t2 + 6 * t);
  }
  double second_t(double t) const {
    return v0 * (12 * t - 6) + width * m0 * (6 * t - 4) + v1 * (-12 * t + 6);
  }
};

}  // namespace

const char* kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::Constant: return "constant";
    case PotentialKind::Periodic1D: return "periodic";
    case PotentialKind::RandomPhase1D: return "random-phase";
    case PotentialKind::HarmonicWell1D: return "harmonic-well";
    case PotentialKind::SeparableND: return "separable";
  }
  return "unknown";
}

Potential Potential::constant(double value) {
  if (!(value >= 0.0)) throw ValidationError("constant potential must be >= 0");
  Potential p;
  p.kind_ = PotentialKind::Constant;
  p.offset_ = value;
  p.u_max_ = value;
  p.d2_bound_ = 0.0;
  p.exact_sup_ = true;
  return p;
}

Potential Potential::periodic1d(std::vector<FourierTerm> terms) {
  if (terms.empty()) throw ValidationError("periodic potential needs at least one term");
  double amp_sum = 0.0;
  for (const FourierTerm& t : terms) {
    if (!std::isfinite(t.amplitude) || !std::isfinite(t.phase) || !std::isfinite(t.wavenumber))
      throw ValidationError("non-finite term in periodic potential");
    const double k = std::round(t.wavenumber);
    if (std::fabs(t.wavenumber - k) > 1e-12 || k < 1.0)
      throw ValidationError("periodic potential wavenumbers must be integers >= 1");
    amp_sum += std::fabs(t.amplitude);
  }
  if (amp_sum == 0.0) throw ValidationError("all amplitudes zero; use the constant kind");
  Potential p;
  p.kind_ = PotentialKind::Periodic1D;
  p.terms_ = std::move(terms);
  p.finalize_trig();
  return p;
}

Potential Potential::cosine_well() {
  return periodic1d({{0.5, 1.0, std::numbers::pi}});
}

Potential Potential::harmonic_well(double half_width, double cap_rise) {
  if (!(half_width > 0.0 && half_width < 0.5)) throw ValidationError("half_width must lie in (0, 0.5)");
  if (!(cap_rise > 0.0)) throw ValidationError("cap_rise must be positive");
  Potential p;
  p.kind_ = PotentialKind::HarmonicWell1D;
  p.well_half_width_ = half_width;
  p.cap_rise_ = cap_rise;
  p.u_max_ = half_width * half_width + cap_rise;
  const double W = 0.5 - half_width;
  HermiteCap cap{half_width * half_width, 2.0 * half_width, p.u_max_, W};
  // monotone cap keeps the max at the cell edge; reject shapes that dip
  const int n = 256;
  for (int i = 0; i <= n; ++i) {
    if (cap.deriv_t(static_cast<double>(i) / n) < -1e-12)
      throw ValidationError("cap parameters give a non-monotone continuation");
  }
  p.d2_bound_ = std::max({2.0, std::fabs(cap.second_t(0.0)) / (W * W), std::fabs(cap.second_t(1.0)) / (W * W)});
  p.exact_sup_ = true;
  return p;
}

Potential Potential::separable(std::vector<Potential> axes) {
  if (axes.size() < 2) throw ValidationError("separable potential needs at least two axes");
  Potential p;
  p.kind_ = PotentialKind::SeparableND;
  p.u_max_ = 0.0;
  p.d2_bound_ = 0.0;
  for (const Potential& ax : axes) {
    if (ax.dim() != 1) throw ValidationError("separable axes must be one-dimensional");
    p.u_max_ += ax.u_max();
    p.d2_bound_ = std::max(p.d2_bound_, ax.second_derivative_bound());
  }
  p.axes_ = std::move(axes);
  return p;
}

void Potential::finalize_trig() {
  double amp_sum = 0.0, d2 = 0.0;
  for (const FourierTerm& t : terms_) {
    amp_sum += std::fabs(t.amplitude);
    d2 += std::fabs(t.amplitude) * kTwoPi * kTwoPi * t.wavenumber * t.wavenumber;
  }
  d2_bound_ = d2;
  if (kind_ == PotentialKind::RandomPhase1D) {
    // Almost-periodic field: range bounds are analytic, inf approached on the
    // line but not attained inside a finite window.
    offset_ = amp_sum;
    u_max_ = 2.0 * amp_sum;
    exact_sup_ = true;
    return;
  }
  if (terms_.size() == 1) {
    offset_ = std::fabs(terms_[0].amplitude);
    u_max_ = 2.0 * std::fabs(terms_[0].amplitude);
    exact_sup_ = true;
    return;
  }
  // multi-term cell: locate min and max by dense scan plus local polish
  const int n = scan_points_per_unit(terms_);
  auto raw = [&](double y) { return trig_raw_value(terms_, y); };
  int imin = 0, imax = 0;
  double vmin = raw(0.0), vmax = vmin;
  for (int i = 1; i < n; ++i) {
    const double v = raw(static_cast<double>(i) / n);
    if (v < vmin) { vmin = v; imin = i; }
    if (v > vmax) { vmax = v; imax = i; }
  }
  const double dy = 1.0 / n;
  const double ymin = quad::golden_section_max([&](double y) { return -raw(y); },
                                               (imin - 1) * dy, (imin + 1) * dy, 1e-13);
  const double ymax = quad::golden_section_max(raw, (imax - 1) * dy, (imax + 1) * dy, 1e-13);
  offset_ = -raw(ymin);
  u_max_ = raw(ymax) + offset_;
  exact_sup_ = false;
}

double Potential::value1(double y) const {
  switch (kind_) {
    case PotentialKind::Constant:
      return offset_;
    case PotentialKind::Periodic1D:
    case PotentialKind::RandomPhase1D:
      return offset_ + trig_raw_value(terms_, y);
    case PotentialKind::HarmonicWell1D: {
      const double r = y - std::floor(y + 0.5);
      const double a = std::fabs(r);
      if (a <= well_half_width_) return r * r;
      const double W = 0.5 - well_half_width_;
      HermiteCap cap{well_half_width_ * well_half_width_, 2.0 * well_half_width_, u_max_, W};
      return cap.value((a - well_half_width_) / W);
    }
    case PotentialKind::SeparableND:
      throw DimensionMismatch("value1 called on a multi-axis potential");
  }
  return 0.0;
}

double Potential::deriv1(double y) const {
  switch (kind_) {
    case PotentialKind::Constant:
      return 0.0;
    case PotentialKind::Periodic1D:
    case PotentialKind::RandomPhase1D:
      return trig_raw_deriv(terms_, y);
    case PotentialKind::HarmonicWell1D: {
      const double r = y - std::floor(y + 0.5);
      const double a = std::fabs(r);
      const double sgn = (r < 0.0) ? -1.0 : 1.0;
      if (a <= well_half_width_) return 2.0 * r;
      const double W = 0.5 - well_half_width_;
      HermiteCap cap{well_half_width_ * well_half_width_, 2.0 * well_half_width_, u_max_, W};
      return sgn * cap.deriv_t((a - well_half_width_) / W) / W;
    }
    case PotentialKind::SeparableND:
      throw DimensionMismatch("deriv1 called on a multi-axis potential");
  }
  return 0.0;
}

double Potential::value(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim()) throw DimensionMismatch("position dimension mismatch");
  if (kind_ != PotentialKind::SeparableND) return value1(y[0]);
  double v = 0.0;
  for (size_t i = 0; i < axes_.size(); ++i) v += axes_[i].value1(y[i]);
  return v;
}

void Potential::gradient(std::span<const double> y, std::span<double> out) const {
  if (static_cast<int>(y.size()) != dim() || out.size() != y.size())
    throw DimensionMismatch("gradient dimension mismatch");
  if (kind_ != PotentialKind::SeparableND) {
    out[0] = deriv1(y[0]);
    return;
  }
  for (size_t i = 0; i < axes_.size(); ++i) out[i] = axes_[i].deriv1(y[i]);
}

double Potential::second_derivative_bound() const { return d2_bound_; }

double Potential::domain_length() const {
  return kind_ == PotentialKind::RandomPhase1D ? window_ : 1.0;
}

double Potential::grid_supremum(int n) const {
  if (kind_ == PotentialKind::SeparableND) {
    double s = 0.0;
    for (const Potential& ax : axes_) s += ax.grid_supremum(n);
    return s;
  }
  if (kind_ == PotentialKind::Constant) return offset_;
  const double L = domain_length();
  if (n < 3) throw ValidationError("grid_supremum needs n >= 3");
  int ibest = 0;
  double vbest = value1(0.0);
  for (int i = 1; i < n; ++i) {
    const double v = value1(L * i / n);
    if (v > vbest) { vbest = v; ibest = i; }
  }
  const double dy = L / n;
  const double y = quad::golden_section_max([this](double s) { return value1(s); },
                                            (ibest - 1) * dy, (ibest + 1) * dy, 1e-13);
  return value1(y);
}

double Potential::average_position(const std::function<double(double)>& f) const {
  if (kind_ == PotentialKind::SeparableND)
    throw DimensionMismatch("averaging is per-axis; average the components");
  if (kind_ == PotentialKind::Constant) return f(0.0);
  const double L = domain_length();
  const int chunks = std::max(1, static_cast<int>(std::ceil(L)));
  quad::Options opt;
  opt.rel_tol = 1e-12;
  opt.max_doublings = 12;
  double total = 0.0;
  for (int c = 0; c < chunks; ++c) {
    const double lo = L * c / chunks;
    const double hi = L * (c + 1) / chunks;
    try {
      total += quad::integrate(f, lo, hi, opt);
    } catch (const QuadratureError&) {
      // steep local feature (e.g. a near-touch of the ceiling inside a long
      // window): refine locally instead of doubling the whole chunk
      total += quad::integrate_adaptive(f, lo, hi, opt);
    }
  }
  return total / L;
}

double Potential::cell_average(const WeightFunctional& w) const {
  if (!w.w) throw ValidationError("empty weight");
  auto f = [&](double s) { return w.w(value1(s)); };
  if (!w.inverse_sqrt_singular || w.energy > u_max_) {
    if (kind_ == PotentialKind::Constant) {
      if (w.inverse_sqrt_singular && w.energy <= u_max_)
        throw NoRunningRegion("singular weight at or below the constant level");
      return w.w(offset_);
    }
    return average_position(f);
  }
  // E <= u_max: integrate over the sub-level set {u < E}
  const double E = w.energy;
  const double L = domain_length();
  if (kind_ == PotentialKind::Constant) throw NoRunningRegion("constant potential has no sub-level set");
  const int per_unit = kind_ == PotentialKind::HarmonicWell1D ? 2048 : scan_points_per_unit(terms_);
  const long n = std::lround(per_unit * L);
  auto below = [&](double s) { return value1(s) < E; };
  double total = 0.0;
  bool any = false;
  long i = 0;
  while (i < n) {
    if (!below(L * i / n)) { ++i; continue; }
    // entered a well: locate its edges
    long j = i;
    while (j < n && below(L * j / n)) ++j;
    double lo = L * i / n, hi = L * (j - 1) / n;
    auto margin = [&](double s) { return E - value1(s); };
    if (i > 0) {
      lo = quad::bracketed_root([&](double s) { return value1(s) - E; }, L * (i - 1) / n, L * i / n, 1e-14);
      lo = quad::nudge_inside(margin, lo, hi);
    }
    if (j < n) {
      hi = quad::bracketed_root([&](double s) { return value1(s) - E; }, L * (j - 1) / n, L * j / n, 1e-14);
      hi = quad::nudge_inside(margin, hi, lo);
    } else {
      hi = L;
    }
    total += quad::integrate_singular(f, lo, hi, i > 0, j < n, quad::singular_options());
    any = true;
    i = j + 1;
  }
  if (!any) throw NoRunningRegion("energy below the potential everywhere on the domain");
  return total / L;
}

std::vector<double> Potential::interior_maxima() const {
  std::vector<double> out;
  if (kind_ == PotentialKind::Constant || kind_ == PotentialKind::RandomPhase1D ||
      kind_ == PotentialKind::SeparableND)
    return out;
  const int n = kind_ == PotentialKind::HarmonicWell1D ? 4096 : 4 * scan_points_per_unit(terms_);
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = value1(static_cast<double>(i) / n);
  const double dy = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    const double prev = vals[(i + n - 1) % n];
    const double next = vals[(i + 1) % n];
    if (vals[i] >= prev && vals[i] >= next && vals[i] > u_max_ - 1e-6) {
      const double y = quad::golden_section_max([this](double s) { return value1(s); },
                                                (i - 1) * dy, (i + 1) * dy, 1e-13);
      if (value1(y) >= u_max_ - 1e-10) {
        double yy = y - std::floor(y);
        bool dup = false;
        for (double seen : out)
          if (std::fabs(seen - yy) < 1e-8 || std::fabs(std::fabs(seen - yy) - 1.0) < 1e-8) dup = true;
        if (!dup) out.push_back(yy);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Well Potential::well_containing(double y, double E) const {
  if (kind_ == PotentialKind::SeparableND) throw DimensionMismatch("wells are one-dimensional");
  if (kind_ == PotentialKind::Constant) throw WellNotFound("constant potential has no wells");
  if (!(value1(y) < E)) throw WellNotFound("anchor is not below the requested energy");
  const int per_unit = kind_ == PotentialKind::HarmonicWell1D ? 2048 : scan_points_per_unit(terms_);
  const double step = 1.0 / per_unit;
  const double reach = kind_ == PotentialKind::RandomPhase1D ? window_ : 1.5;
  auto turning = [&](double from, double dir) {
    double prev = from;
    for (double d = step; d <= reach + step; d += step) {
      const double s = from + dir * d;
      if (value1(s) >= E) {
        const double a = std::min(prev, s), b = std::max(prev, s);
        return quad::bracketed_root([&](double t) { return value1(t) - E; }, a, b, 1e-14);
      }
      prev = s;
    }
    throw WellNotFound("no turning point within the search range");
  };
  Well w;
  w.lo = turning(y, -1.0);
  w.hi = turning(y, +1.0);
  return w;
}

Potential Potential::shifted(double z) const {
  if (kind_ == PotentialKind::Constant) return *this;
  if (kind_ != PotentialKind::Periodic1D && kind_ != PotentialKind::RandomPhase1D)
    throw ValidationError("shift rule applies to trigonometric kinds only");
  Potential p = *this;
  for (FourierTerm& t : p.terms_) {
    double ph = std::fmod(t.phase + kTwoPi * t.wavenumber * z, kTwoPi);
    if (ph < 0.0) ph += kTwoPi;
    t.phase = ph;
  }
  return p;
}

Potential RandomPhaseModel::realize(std::uint64_t seed) const {
  if (modes.empty()) throw ValidationError("random-phase model needs at least one mode");
  if (!(window > 1.0)) throw ValidationError("averaging window must exceed 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, kTwoPi);
  Potential p;
  p.kind_ = PotentialKind::RandomPhase1D;
  p.window_ = window;
  p.has_seed_ = true;
  p.seed_ = seed;
  p.terms_.reserve(modes.size());
  for (const RandomPhaseMode& m : modes) {
    if (!(m.wavenumber > 0.0) || !std::isfinite(m.amplitude))
      throw ValidationError("bad random-phase mode");
    p.terms_.push_back({m.amplitude, m.wavenumber, uni(rng)});
  }
  p.finalize_trig();
  return p;
}

double RandomPhaseModel::mean_value() const {
  double s = 0.0;
  for (const RandomPhaseMode& m : modes) s += std::fabs(m.amplitude);
  return s;
}

double RandomPhaseModel::sup_bound() const { return 2.0 * mean_value(); }

RandomPhaseModel RandomPhaseModel::standard() {
  RandomPhaseModel m;
  m.modes = {{0.3, std::numbers::sqrt2}, {0.2, std::sqrt(5.0)}};
  m.window = 1e4;
  return m;
}

}  // namespace homokin
