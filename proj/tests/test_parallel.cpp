#include <vector>

#include "doctest.h"
#include "homokin/closedform.hpp"
#include "homokin/ergodic.hpp"
#include "homokin/homogenize.hpp"
#include "homokin/parallel.hpp"
#include "homokin/potential.hpp"

using namespace homokin;

TEST_CASE("for_each_index touches every slot exactly once") {
  std::vector<int> hits(1000, 0);
  par::set_jobs(par::hardware_jobs());
  par::for_each_index(par::Exec::Parallel, 1000, [&](long i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  par::for_each_index(par::Exec::Serial, 0, [&](long) { FAIL("body ran for n = 0"); });
}

TEST_CASE("parallel sweeps are bitwise equal to the serial reference") {
  const Potential u = Potential::cosine_well();
  par::set_jobs(4);

  const EffectiveVelocityTable ts = phi_table(u, 1.2, 8.0, 64, par::Exec::Serial);
  const EffectiveVelocityTable tp = phi_table(u, 1.2, 8.0, 64, par::Exec::Parallel);
  REQUIRE(ts.phi_values.size() == tp.phi_values.size());
  for (size_t i = 0; i < ts.phi_values.size(); ++i) {
    CHECK(ts.energies[i] == tp.energies[i]);
    CHECK(ts.phi_values[i] == tp.phi_values[i]);
  }

  const RandomPhaseModel model = RandomPhaseModel::standard();
  const EnsembleStats es =
      ensemble_project(model, Observable::momentum(), 2.0, 100.0, 1e-3, 1, 6, par::Exec::Serial);
  const EnsembleStats ep = ensemble_project(model, Observable::momentum(), 2.0, 100.0, 1e-3, 1,
                                            6, par::Exec::Parallel);
  CHECK(es.mean == ep.mean);
  CHECK(es.std_error == ep.std_error);
  for (size_t i = 0; i < es.per_seed.size(); ++i) CHECK(es.per_seed[i] == ep.per_seed[i]);

  const InitialData f0{MacroFunction::bump(0.0, 1.0, 1.0), Observable::sin_y(1.0)};
  const Box box{-1.0, 1.0, -2.0, 2.0};
  const SampledNorm rs = residual_norm(u, f0, 0.1, 0.5, box, 48, 2, par::Exec::Serial);
  const SampledNorm rp = residual_norm(u, f0, 0.1, 0.5, box, 48, 2, par::Exec::Parallel);
  CHECK(rs.value == rp.value);
  CHECK(rs.std_error == rp.std_error);
  CHECK(rs.n_skipped == rp.n_skipped);
}
