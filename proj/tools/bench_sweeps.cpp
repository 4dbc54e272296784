// Timing comparison of the serial reference path against the OpenMP path for
// the three embarrassingly parallel sweeps. Values must agree bitwise; the
// serial runs are the reference implementation the tests pin against.
#include <chrono>
#include <cstdio>
#include <string>

#include "homokin/closedform.hpp"
#include "homokin/ergodic.hpp"
#include "homokin/homogenize.hpp"
#include "homokin/observable.hpp"
#include "homokin/parallel.hpp"
#include "homokin/potential.hpp"

namespace {

using homokin::Observable;
using homokin::Potential;
namespace par = homokin::par;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

template <typename Fn>
double timed(Fn&& fn) {
  const double t0 = now_ms();
  fn();
  return now_ms() - t0;
}

void report(const char* name, double serial_ms, double parallel_ms, double gap) {
  std::printf("%-22s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   |gap| %.3g\n", name,
              serial_ms, parallel_ms, serial_ms / parallel_ms, gap);
}

}  // namespace

int main(int argc, char** argv) {
  int jobs = par::hardware_jobs();
  if (argc > 1) jobs = std::stoi(argv[1]);
  par::set_jobs(jobs);
  std::printf("jobs: %d (hardware %d)\n", jobs, par::hardware_jobs());

  const Potential u = Potential::cosine_well();

  {
    homokin::EffectiveVelocityTable a, b;
    const double ts = timed([&] { a = homokin::phi_table(u, 1.2, 10.0, 400, par::Exec::Serial); });
    const double tp =
        timed([&] { b = homokin::phi_table(u, 1.2, 10.0, 400, par::Exec::Parallel); });
    double gap = 0.0;
    for (size_t i = 0; i < a.phi_values.size(); ++i)
      gap = std::max(gap, std::fabs(a.phi_values[i] - b.phi_values[i]));
    report("phi_table n=400", ts, tp, gap);
  }

  {
    const homokin::RandomPhaseModel model = homokin::RandomPhaseModel::standard();
    const Observable F = Observable::sin_y(1.0);
    homokin::EnsembleStats a, b;
    const double ts = timed(
        [&] { a = homokin::ensemble_project(model, F, 2.0, 200.0, 1e-3, 7, 8, par::Exec::Serial); });
    const double tp = timed([&] {
      b = homokin::ensemble_project(model, F, 2.0, 200.0, 1e-3, 7, 8, par::Exec::Parallel);
    });
    report("ensemble_project n=8", ts, tp, std::fabs(a.mean - b.mean));
  }

  {
    const homokin::InitialData f0{homokin::MacroFunction::bump(0.0, 1.0, 1.0),
                                  Observable::sin_y(1.0)};
    const homokin::Box box{-1.0, 1.0, -2.0, 2.0};
    homokin::SampledNorm a, b;
    const double ts = timed([&] {
      a = homokin::residual_norm(u, f0, 0.05, 0.5, box, 128, 1, par::Exec::Serial);
    });
    const double tp = timed([&] {
      b = homokin::residual_norm(u, f0, 0.05, 0.5, box, 128, 1, par::Exec::Parallel);
    });
    report("residual_norm n=128", ts, tp, std::fabs(a.value - b.value));
  }

  return 0;
}
