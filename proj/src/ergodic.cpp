#include "homokin/ergodic.hpp"

#include <cmath>
#include <memory>

#include "homokin/closedform.hpp"
#include "homokin/lowdisc.hpp"

namespace homokin {

ErgodicEstimate time_average(const Potential& u, const Observable& F, const PhasePoint& start,
                             double T, double h) {
  const long n_steps = steps_for(T, h);
  if (n_steps < 4) throw ValidationError("time average needs at least four steps");
  if (classify(u, start) == OrbitClass::NearCritical)
    throw CriticalEnergyError("start too close to the critical energy for a time average");
  ErgodicEstimate out;
  out.step = h;
  out.T_used = h * n_steps;
  double acc = 0.0;
  double prev = 0.0;
  long idx = 0;
  const long quarter = n_steps / 4;
  PhasePoint s = start;
  walk(u, s, h, n_steps, [&](double t, const PhasePoint& p) {
    const double f = F(std::span<const double>(p.y.data(), p.y.size()),
                       std::span<const double>(p.xi.data(), p.xi.size()));
    if (idx > 0) acc += 0.5 * (prev + f) * h;
    prev = f;
    if (idx > 0 && (idx % quarter == 0 || idx == n_steps) &&
        static_cast<long>(out.window_means.size()) < 4)
      out.window_means.push_back(acc / t);
    ++idx;
  });
  out.value = acc / out.T_used;
  while (out.window_means.size() < 4) out.window_means.push_back(out.value);
  out.tail_variation = std::fabs(out.window_means[3] - out.window_means[2]);
  return out;
}

ErgodicEstimate xsharp_empirical(const Potential& u, const PhasePoint& start, double T, double h) {
  if (start.dim() != 1) throw DimensionMismatch("drift readout is one-dimensional");
  const long n_steps = steps_for(T, h);
  if (n_steps < 4) throw ValidationError("drift readout needs at least four steps");
  if (classify(u, start) == OrbitClass::NearCritical)
    throw CriticalEnergyError("start too close to the critical energy for a drift readout");
  ErgodicEstimate out;
  out.step = h;
  out.T_used = h * n_steps;
  const long quarter = n_steps / 4;
  long idx = 0;
  PhasePoint s = start;
  walk(u, s, h, n_steps, [&](double t, const PhasePoint& p) {
    if (idx > 0 && (idx % quarter == 0 || idx == n_steps) &&
        static_cast<long>(out.window_means.size()) < 4)
      out.window_means.push_back((start.y[0] - p.y[0]) / t);
    ++idx;
  });
  out.value = (start.y[0] - s.y[0]) / out.T_used;
  while (out.window_means.size() < 4) out.window_means.push_back(out.value);
  out.tail_variation = std::fabs(out.window_means[3] - out.window_means[2]);
  return out;
}

double xsharp_quadrature(const Potential& u, const PhasePoint& start, double T, double h) {
  if (start.dim() != 1) throw DimensionMismatch("drift readout is one-dimensional");
  return time_average(u, Observable::momentum(), start, T, h).value;
}

ErgodicEstimate project_empirical(const Potential& u, const Observable& F,
                                  const PhasePoint& start, double T, double h,
                                  double ball_radius, int ball_samples, std::uint64_t ball_seed) {
  if (ball_radius == 0.0) return time_average(u, F, start, T, h);
  if (ball_radius < 0.0 || ball_samples < 1) throw ValidationError("bad ball parameters");
  // average the estimate over low-discrepancy starts in the ball; skip
  // offsets that land outside the start's orbit class
  const OrbitClass base = classify(u, start);
  HaltonSequence seq(2 * start.dim(), ball_seed);
  ErgodicEstimate out;
  std::vector<double> sums(4, 0.0);
  int used = 0;
  for (int k = 0; k < ball_samples; ++k) {
    const std::vector<double> unit = seq.next();
    PhasePoint s = start;
    for (int d = 0; d < start.dim(); ++d) {
      s.y[d] += ball_radius * (2.0 * unit[d] - 1.0);
      s.xi[d] += ball_radius * (2.0 * unit[start.dim() + d] - 1.0);
    }
    if (classify(u, s) != base) continue;
    const ErgodicEstimate e = time_average(u, F, s, T, h);
    for (int j = 0; j < 4; ++j) sums[j] += e.window_means[j];
    out.value += e.value;
    out.T_used = e.T_used;
    out.step = e.step;
    ++used;
  }
  if (used == 0) throw NumericError("every ball sample left the start's orbit class");
  out.value /= used;
  for (int j = 0; j < 4; ++j) out.window_means.push_back(sums[j] / used);
  out.tail_variation = std::fabs(out.window_means[3] - out.window_means[2]);
  return out;
}

Observable defect_observable(const Potential& u, const Observable& F, double cache_rel) {
  if (u.dim() != 1) throw ProjectionUnavailable("defect observables need a per-axis projection");
  struct Cache {
    bool valid = false;
    double energy = 0.0;
    double sigma = 0.0;
    double projection = 0.0;
  };
  auto cache = std::make_shared<Cache>();
  auto up = std::make_shared<Potential>(u);
  auto Fp = std::make_shared<Observable>(F);
  return {"defect(" + F.label() + ")", 1,
          [cache, up, Fp, cache_rel](std::span<const double> y, std::span<const double> xi) {
            PhasePoint s{y[0], xi[0]};
            const double E = hamiltonian(*up, s);
            const double sigma = xi[0] < 0.0 ? -1.0 : 1.0;
            if (!cache->valid ||
                std::fabs(E - cache->energy) > cache_rel * std::max(1.0, std::fabs(E)) ||
                sigma != cache->sigma) {
              cache->projection = project_state(*up, *Fp, s);
              cache->energy = E;
              cache->sigma = sigma;
              cache->valid = true;
            }
            return (*Fp)(y, xi) - cache->projection;
          }};
}

namespace {

EnsembleStats reduce_slots(const std::vector<double>& slot, const std::vector<char>& used) {
  EnsembleStats out;
  for (size_t i = 0; i < slot.size(); ++i) {
    if (!used[i]) {
      ++out.n_skipped;
      continue;
    }
    out.per_seed.push_back(slot[i]);
  }
  out.n_used = static_cast<int>(out.per_seed.size());
  if (out.n_used == 0) return out;
  double sum = 0.0;
  for (double v : out.per_seed) sum += v;
  out.mean = sum / out.n_used;
  if (out.n_used > 1) {
    double ss = 0.0;
    for (double v : out.per_seed) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (out.n_used - 1)) / std::sqrt(static_cast<double>(out.n_used));
  }
  return out;
}

}  // namespace

EnsembleStats ensemble_project(const RandomPhaseModel& model, const Observable& F, double xi0,
                               double T, double h, std::uint64_t seed0, int n_seeds,
                               par::Exec mode) {
  if (n_seeds < 1) throw ValidationError("ensemble needs at least one seed");
  std::vector<double> slot(n_seeds, 0.0);
  std::vector<char> used(n_seeds, 0);
  par::for_each_index(mode, n_seeds, [&](long i) {
    const Potential u = model.realize(seed0 + static_cast<std::uint64_t>(i));
    const PhasePoint start{0.0, xi0};
    if (classify(u, start) != OrbitClass::Running) return;
    slot[i] = time_average(u, F, start, T, h).value;
    used[i] = 1;
  });
  return reduce_slots(slot, used);
}

EnsembleStats ensemble_drift_gap(const RandomPhaseModel& model, double xi0, double T, double h,
                                 std::uint64_t seed0, int n_seeds, par::Exec mode) {
  if (n_seeds < 1) throw ValidationError("ensemble needs at least one seed");
  std::vector<double> slot(n_seeds, 0.0);
  std::vector<char> used(n_seeds, 0);
  par::for_each_index(mode, n_seeds, [&](long i) {
    const Potential u = model.realize(seed0 + static_cast<std::uint64_t>(i));
    const PhasePoint start{0.0, xi0};
    if (classify(u, start) != OrbitClass::Running) return;
    const double measured = xsharp_empirical(u, start, T, h).value;
    const double predicted = xsharp_closed(u, start);
    slot[i] = measured - predicted;
    used[i] = 1;
  });
  return reduce_slots(slot, used);
}

}  // namespace homokin
