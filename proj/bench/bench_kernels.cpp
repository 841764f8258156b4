#include <benchmark/benchmark.h>

#include <random>

#include "pfwi/forward.hpp"

namespace {

pfwi::PoroelasticParams rock() {
  pfwi::PoroelasticParams p;
  p.phi = 0.2;
  p.rho_s = 2500.0;
  p.rho_f = 1000.0;
  p.eta = 1e-3;
  p.K_s = 40e9;
  p.K_f = 2.5e9;
  p.kappa = {1e-9, 1e-9};
  p.alpha_inf = {2.0, 2.0};
  p.stiffness = {16e9, 4e9, 4e9, 16e9, 6e9};
  return p;
}

struct Setup {
  pfwi::ForwardProblem fp;
  std::vector<double> u, z;

  explicit Setup(std::size_t n) {
    const pfwi::Grid2D g{n, n, 5.0, 5.0, 0.0, 0.0};
    const pfwi::MaterialField mf(n, n, rock());
    pfwi::SimConfig sim;
    sim.t_final = 1e-3;
    const auto disc = pfwi::resolve_discretization(mf, g, sim);
    pfwi::KernelPair k = pfwi::KernelPair::empty(rock());
    k.x.poles = {-10.0, -1000.0};
    k.x.residues = {1.0, 2.0};
    k.z = k.x;
    k.z.axis = pfwi::Axis::z;
    fp = pfwi::build_problem(mf, g, k, {}, {}, sim, disc);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    u.resize(fp.ops.n_fields() * g.size());
    for (double& v : u) v = nd(rng);
    z.resize(u.size());
  }
};

template <bool Omp>
void BM_Transport(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  const auto kv = s.fp.ops.view();
  for (auto _ : st) {
    if (Omp) pfwi::kernels::omp::transport(kv, s.u.data(), s.z.data());
    else pfwi::kernels::serial::transport(kv, s.u.data(), s.z.data());
    benchmark::DoNotOptimize(s.z.data());
  }
}

template <bool Omp>
void BM_Local(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  const auto kv = s.fp.ops.view();
  for (auto _ : st) {
    if (Omp) pfwi::kernels::omp::local(kv, s.u.data(), false);
    else pfwi::kernels::serial::local(kv, s.u.data(), false);
    benchmark::DoNotOptimize(s.u.data());
  }
}

template <bool Omp>
void BM_Step(benchmark::State& st) {
  Setup s(static_cast<std::size_t>(st.range(0)));
  s.fp.sim.backend = Omp ? pfwi::Backend::omp : pfwi::Backend::serial;
  pfwi::Stepper stepper(s.fp);
  std::fill(s.u.begin(), s.u.end(), 0.0);
  for (auto _ : st) {
    stepper.step(s.u.data(), 0);
    benchmark::DoNotOptimize(s.u.data());
  }
}

}  // namespace

BENCHMARK(BM_Transport<false>)->Arg(128)->Arg(256);
BENCHMARK(BM_Transport<true>)->Arg(128)->Arg(256);
BENCHMARK(BM_Local<false>)->Arg(128)->Arg(256);
BENCHMARK(BM_Local<true>)->Arg(128)->Arg(256);
BENCHMARK(BM_Step<false>)->Arg(128);
BENCHMARK(BM_Step<true>)->Arg(128);

BENCHMARK_MAIN();
