#include <cmath>
#include <numeric>

#include "common.hpp"
#include "doctest.h"
#include "pfwi/adjoint.hpp"
#include "pfwi/errors.hpp"

using namespace pfwi;
using namespace pfwi::test;

namespace {

struct Tiny {
  Grid2D g{20, 20, 5.0, 5.0, 0.0, 0.0};
  PoroelasticParams p = desk_material();
  MaterialField mf{20, 20, desk_material()};
  KernelPair k = fitted_pair(desk_material(), 30.0, 3);
  SimConfig sim;
  ForwardProblem fp;
  Tiny() {
    sim.t_final = 0.03;
    sim.boundary.width = 4;
    const Discretization d = resolve_discretization(mf, g, sim);
    fp = build_problem(mf, g, k, {explosive(45.0, 50.0, 60.0)},
                       {receiver(55.0, 45.0, 8 + k.x.size() + k.z.size(), {kV1, kV3, kNegP})}, sim, d);
  }
};

}  // namespace

TEST_CASE("trapezoid weights integrate constants exactly") {
  const auto w = trapezoid_weights(11, 0.1);
  REQUIRE(w.size() == 11);
  CHECK(w.front() == doctest::Approx(0.05));
  CHECK(w[5] == doctest::Approx(0.1));
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0));
}

TEST_CASE("residual sources are masked differences") {
  Tiny t;
  const ForwardRun run = run_forward(t.fp);
  SeismogramSet obs = run.traces;
  for (double& x : obs.data) x *= 0.5;
  const SeismogramSet r = residual_sources(run.traces, obs);
  for (std::size_t n = 0; n < r.n_samples; ++n) {
    CHECK(r.at(0, n, kV1) == doctest::Approx(0.5 * run.traces.at(0, n, kV1)));
    CHECK(r.at(0, n, kQ1) == 0.0);
  }
  SeismogramSet shorter = obs;
  shorter.resize(1, obs.n_samples - 1, obs.n_components);
  CHECK_THROWS_AS(residual_sources(run.traces, shorter), GeometryMismatch);
  SeismogramSet other_dt = obs;
  other_dt.dt *= 2.0;
  CHECK_THROWS_AS(residual_sources(run.traces, other_dt), GeometryMismatch);
}

TEST_CASE("zero residual leaves the adjoint at rest") {
  Tiny t;
  const ForwardRun run = run_forward(t.fp);
  const SeismogramSet r = residual_sources(run.traces, run.traces);
  const AdjointRun a = run_adjoint(t.fp, run, r, trapezoid_weights(r.n_samples, r.dt), {});
  CHECK(a.max_abs_final == 0.0);
}

TEST_CASE("adjoint needs the forward checkpoints") {
  Tiny t;
  ForwardRun run = run_forward(t.fp);
  const SeismogramSet r = residual_sources(run.traces, run.traces);
  run.checkpoints.clear();
  CHECK_THROWS_AS(run_adjoint(t.fp, run, r, trapezoid_weights(r.n_samples, r.dt), {}), MissingForwardRun);
}

TEST_CASE("dot-product test holds to round-off") {
  Tiny t;
  for (std::uint64_t seed : {11u, 12u}) {
    const DotProductResult d = dot_product_test(t.fp, seed);
    CHECK(std::abs(d.forward_side) > 0.0);
    CHECK(d.discrepancy < 1e-12);
  }
}

TEST_CASE("adjoint snapshots are kept in descending time") {
  Tiny t;
  const ForwardRun run = run_forward(t.fp);
  SeismogramSet obs = run.traces;
  for (double& x : obs.data) x = 0.0;
  const SeismogramSet r = residual_sources(run.traces, obs);
  AdjointOptions opt;
  opt.snapshot_every = 5;
  const AdjointRun a = run_adjoint(t.fp, run, r, trapezoid_weights(r.n_samples, r.dt), opt);
  REQUIRE(a.snapshots.size() >= 2);
  CHECK(a.snapshots.front().time > a.snapshots.back().time);
  CHECK(a.max_abs_final > 0.0);
}
