// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "common.hpp"
#include "pfwi/adjoint.hpp"
#include "pfwi/energy.hpp"
#include "pfwi/errors.hpp"
#include "pfwi/forward.hpp"
#include "pfwi/inversion.hpp"
#include "pfwi/kernel_fit.hpp"
#include "pfwi/memory.hpp"
#include "pfwi/multiprecision.hpp"

using namespace pfwi;
using namespace pfwi::test;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------- kernel fit

struct JkdFit {
  PoroelasticParams p;
  FrequencyGrid grid;
  KernelFit fit;
  InterpolationData data;
  double seconds = 0.0;
};

const JkdFit& jkd_fit() {
  static const JkdFit f = [] {
    JkdFit r;
    r.p = jkd_material();
    r.grid = {20, Spacing::log, 2.0 * M_PI * 1.0, 2.0 * M_PI * 1e5};
    Stopwatch sw;
    r.fit = fit_kernel(r.p, r.grid, Axis::x, 256);
    r.seconds = sw.seconds();
    r.data = sample_kernel(r.p, r.grid, Axis::x, 256);
    return r;
  }();
  return f;
}

Outcome kernel_fit_accuracy() {
  const JkdFit& f = jkd_fit();
  const PoleResidueSet& set = f.fit.set;
  // held-out points: geometric midpoints between 201 log-spaced points
  const double lo = std::log(f.grid.omega_min), hi = std::log(f.grid.omega_max);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double w = std::exp(lo + (hi - lo) * (i + 0.5) / 200.0);
    const std::complex<double> s(0.0, -w);
    const std::complex<double> exact = direct_tortuosity(f.p, s, 0);
    std::complex<double> approx = set.alpha_inf + set.a / s;
    for (std::size_t k = 0; k < set.size(); ++k) approx += set.residues[k] / (s - set.poles[k]);
    worst = std::max(worst, std::abs(approx - exact) / std::abs(exact));
  }
  bool signs = set.size() > 0;
  for (std::size_t k = 0; k < set.size(); ++k) signs = signs && set.poles[k] < 0.0 && set.residues[k] > 0.0;
  const bool pass = worst <= 1e-6 && signs && f.seconds <= 30.0;
  return {pass, fmt("max rel err %.3e (<= 1e-6), N = %zu, signs %s, fit %.2f s (<= 30 s)", worst, set.size(),
                    signs ? "ok" : "VIOLATED", f.seconds)};
}

Outcome interpolation_exactness() {
  const JkdFit& f = jkd_fit();
  mp::PrecisionScope scope(256);
  using mp::Real;
  const PoroelasticParams& p = f.p;
  const Real ainf(p.alpha_inf[0]);
  const Real a = Real(p.eta) * Real(p.phi) / (Real(p.rho_f) * Real(p.kappa[0]));
  const Real lam2 = Real(4) * ainf * Real(p.kappa[0]) / (Real(p.phi) * Real(p.pride[0]));
  const Real coef = Real(4) * ainf * ainf * Real(p.kappa[0]) * Real(p.kappa[0]) * Real(p.rho_f) /
                    (Real(p.eta) * lam2 * Real(p.phi) * Real(p.phi));
  double worst = 0.0;
  for (double w : f.grid.nodes()) {
    const mp::Complex s(Real(0), -Real(w));
    // D = T - a/s = alpha_inf + (a/s)(sqrt(1 + coef s) - 1)
    const mp::Complex root = mp::sqrt(mp::Complex(Real(1)) + coef * s);
    const mp::Complex d = mp::Complex(ainf) + (mp::Complex(a) / s) * (root - Real(1));
    mp::Complex approx(Real(f.fit.raw.alpha_inf));
    for (std::size_t k = 0; k < f.fit.raw.poles.size(); ++k)
      approx += mp::Complex(f.fit.raw.residues[k]) / (s - f.fit.raw.poles[k]);
    worst = std::max(worst, static_cast<double>(mp::abs(approx - d) / mp::abs(d)));
  }
  return {worst <= 1e-20, fmt("max rel defect at %zu nodes %.3e (<= 1e-20)", f.grid.count, worst)};
}

Outcome round_trip_recovery() {
  const std::vector<double> poles{-2.0, -35.0, -800.0};
  const std::vector<double> residues{0.5, 3.0, 40.0};
  std::vector<double> omega;
  for (int i = 0; i < 3; ++i) omega.push_back(std::pow(10.0, 3.0 * i / 2.0));
  const InterpolationData data = sample_stieltjes(omega, 1.5, poles, residues, 256);
  const GeneralizedEigen eig = solve_generalized_eig(assemble_pick_matrices(data));
  const PoleResidueSet got = extract_pole_residue(eig, data, 1.5, 0.0, Axis::x);
  if (got.size() != 3) return {false, fmt("recovered %zu terms, expected 3", got.size())};
  std::vector<std::size_t> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return got.poles[i] > got.poles[j]; });
  double worst = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    worst = std::max(worst, std::abs(got.poles[order[k]] - poles[k]) / std::abs(poles[k]));
    worst = std::max(worst, std::abs(got.residues[order[k]] - residues[k]) / residues[k]);
  }
  return {worst <= 1e-8, fmt("max rel error of poles/residues %.3e (<= 1e-8)", worst)};
}

// ------------------------------------------------------------------- energy

Outcome energy_decay() {
  Stopwatch sw;
  const PoroelasticParams p = desk_material();
  const std::size_t n = 200;
  const Grid2D g{n, n, 5.0, 5.0, 0.0, 0.0};
  const MaterialField mf(n, n, p);
  const double f0 = 30.0;
  const KernelPair k = fitted_pair(p, f0, 2);
  std::vector<EnergyLedger> ledgers;
  bool monotone = true;
  double worst_inc = 0.0;
  for (double safety : {0.25, 0.125}) {
    SimConfig sim;
    sim.t_final = 0.3;
    sim.cfl_safety = safety;
    sim.energy_every = 1;
    sim.boundary.width = 20;
    sim.boundary.strength = 20.0;
    const ForwardRun run = simulate(mf, g, k, {explosive(500.0, 500.0, f0)}, {}, sim);
    const DecayReport rep = check_decay(run.ledger, 1e-8, run.ledger.source_end, false);
    monotone = monotone && rep.monotone && rep.checked > 10;
    worst_inc = std::max(worst_inc, rep.worst_increase);
    ledgers.push_back(run.ledger);
  }
  // residual at the coarse sample times, over the post-source window
  double r0 = 0.0, r1 = 0.0;
  const auto& a = ledgers[0].samples;
  const auto& b = ledgers[1].samples;
  for (std::size_t i = 1; i < a.size() && 2 * i < b.size(); ++i) {
    if (a[i - 1].t < ledgers[0].source_end) continue;
    r0 = std::max(r0, a[i].balance);
    r1 = std::max(r1, b[2 * i].balance);
  }
  const double order = std::log2(r0 / r1);
  const double secs = sw.seconds();
  const bool pass = monotone && order >= 1.8 && secs <= 300.0;
  return {pass, fmt("post-source E non-increasing: %s (worst rel increase %.1e, tol 1e-8); balance residual "
                    "%.3e -> %.3e, order %.2f (>= 1.8); %.0f s (<= 300 s)",
                    monotone ? "yes" : "NO", worst_inc, r0, r1, order, secs)};
}

Outcome conservative_limit() {
  PoroelasticParams p = desk_material();
  p.eta = 0.0;
  const std::size_t n = 64;
  const Grid2D g{n, n, 5.0, 5.0, 0.0, 0.0};
  const MaterialField mf(n, n, p);
  const KernelPair k = KernelPair::empty(p);
  std::vector<double> drift;
  for (double safety : {0.8, 0.4, 0.2, 0.1}) {
    SimConfig sim;
    sim.t_final = 0.3;
    sim.cfl_safety = safety;
    sim.energy_every = 1;
    sim.boundary.kind = BoundaryConfig::Kind::periodic;
    const ForwardRun run = simulate(mf, g, k, {explosive(160.0, 160.0, 30.0)}, {}, sim);
    const auto& s = run.ledger.samples;
    auto first = std::find_if(s.begin(), s.end(), [&](const EnergySample& e) { return e.t >= run.ledger.source_end; });
    drift.push_back(std::abs(s.back().Etot - first->Etot) / first->Etot);
  }
  double order = 1e300;
  std::string orders;
  for (std::size_t i = 1; i < drift.size(); ++i) {
    const double o = std::log2(drift[i - 1] / drift[i]);
    order = std::min(order, o);
    orders += fmt("%s%.2f", i > 1 ? ", " : "", o);
  }
  const bool pass = order >= 3.5 && drift.back() <= 1e-6;
  return {pass, fmt("drift %.2e .. %.2e, observed orders [%s] (>= 3.5), finest drift %.2e (<= 1e-6)", drift.front(),
                    drift.back(), orders.c_str(), drift.back())};
}

// ------------------------------------------------------------------ adjoint

Outcome adjoint_exactness() {
  Stopwatch sw;
  const PoroelasticParams p = desk_material();
  const Grid2D g{16, 16, 5.0, 5.0, 0.0, 0.0};
  const MaterialField mf(16, 16, p);
  const KernelPair k = fitted_pair(p, 30.0, 4);
  const std::size_t nc = 8 + k.x.size() + k.z.size();
  SimConfig sim;
  sim.boundary.width = 3;
  sim.dt = cfl_dt(mf, g, 0.5);
  sim.t_final = 50 * sim.dt;
  const Discretization disc = resolve_discretization(mf, g, sim);
  SourceSpec force = explosive(37.0, 41.0, 30.0);
  force.channel = SourceChannel::force;
  force.c1 = 0.3;
  force.c2 = 1.0;
  const ForwardProblem fp =
      build_problem(mf, g, k, {explosive(40.0, 35.0, 30.0), force},
                    {receiver(25.0, 25.0, nc, {kV1, kV3, kNegP}), receiver(52.0, 47.0, nc, {kQ1, kTau13, kTau33})},
                    sim, disc);
  double worst = 0.0;
  for (std::uint64_t seed : {1u, 2u, 3u}) worst = std::max(worst, dot_product_test(fp, seed).discrepancy);
  const double secs = sw.seconds();
  return {worst <= 1e-12 && disc.n_steps == 50 && secs <= 10.0,
          fmt("%zu steps, N = %zu per axis, max relative discrepancy over 3 seeds %.2e (<= 1e-12); %.2f s (<= 10 s)",
              disc.n_steps, k.x.size(), worst, secs)};
}

Outcome gradient_correctness() {
  Stopwatch sw;
  const PoroelasticParams p = desk_material();
  const std::size_t n = 50;
  const Grid2D g{n, n, 5.0, 5.0, 0.0, 0.0};
  const MaterialField base(n, n, p);
  const KernelPair k = fitted_pair(p, 30.0, 4);
  const std::size_t nc = 8 + k.x.size() + k.z.size();
  SimConfig sim;
  sim.t_final = 0.18;
  sim.boundary.width = 10;
  std::vector<ReceiverSpec> recs;
  for (int i = 0; i < 4; ++i) recs.push_back(receiver(80.0 + 30.0 * i, 180.0, nc, {kV1, kV3, kNegP}));
  Survey sv = make_survey(base, g, k, sim, {{explosive(125.0, 70.0, 30.0)}}, recs);
  MaterialField truth = base;
  for (std::size_t j = 22; j <= 27; ++j)
    for (std::size_t i = 22; i <= 27; ++i) {
      truth.set_param(g.index(i, j), ParamId::kappa_1, 2.5e-9);
      truth.set_param(g.index(i, j), ParamId::c55, 6.6e9);
    }
  synthesize_observed(sv, truth);
  ParameterSelection sel;
  sel.params = {{ParamId::kappa_1, 1e-10, 1e-7, 1e-9},
                {ParamId::phi, 0.05, 0.5, 0.2},
                {ParamId::c55, 1e9, 2e10, 6e9},
                {ParamId::K_f, 1e9, 5e9, 2.5e9},
                {ParamId::eta, 1e-4, 1e-2, 1e-3}};
  const GradientCheck gc = fd_gradient_check(sv, base, sel, 5, 2024);
  std::string which;
  for (const auto& pr : gc.probes)
    which += fmt("%s%s@(%zu,%zu)", which.empty() ? "" : " ", std::string(param_name(pr.id)).c_str(), pr.cell % n,
                 pr.cell / n);
  const double secs = sw.seconds();
  return {gc.probes.size() == 5 && gc.max_rel_error <= 1e-4 && secs <= 600.0,
          fmt("%zu probes [%s], max rel error %.2e (<= 1e-4); %.0f s (<= 600 s)", gc.probes.size(), which.c_str(),
              gc.max_rel_error, secs)};
}

// ------------------------------------------------------------------- memory

Outcome drag_equivalence() {
  const PoroelasticParams p = jkd_material();
  // centre the band on the relaxation rate so the memory part of the drag
  // carries a large share of the signal
  const double f0 = 5000.0;
  const PoleResidueSet set = fit_kernel(p, FrequencyGrid::around_source(f0, 10), Axis::x).set;
  Ricker w;
  w.f0 = f0;
  const double dt = 1.0 / (100.0 * f0);
  const auto n = static_cast<std::size_t>(std::ceil(3.0 * w.end_time() / dt));
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = w(static_cast<double>(i) * dt);
  q[0] = 0.0;
  const auto a = pole_residue_drag(q, set, p, dt);
  const auto b = jkd_drag_oracle(q, p, Axis::x, dt, 200);
  double num = 0.0, den = 0.0, mem = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
    const double r = b[i] - p.eta / p.kappa[0] * q[i];
    mem += r * r;
  }
  const double rel = std::sqrt(num / den);
  return {rel <= 1e-3, fmt("relative L2 %.2e (<= 1e-3), Nq = 200, N = %zu, memory share of drag %.2f", rel,
                           set.size(), std::sqrt(mem / den))};
}

Outcome phi_theta_identity() {
  const PoroelasticParams p = jkd_material();
  const double f0 = 30.0;
  const PoleResidueSet set = fit_kernel(p, FrequencyGrid::around_source(f0, 8), Axis::x).set;
  double worst = 0.0;
  // two test signals: a Ricker and a smooth ramp-plus-oscillation
  struct Signal {
    std::function<double(double)> q, dq;
    double t_end;
  };
  Ricker w;
  w.f0 = f0;
  const double t0 = w.delay(), b = M_PI * M_PI * f0 * f0;
  const std::vector<Signal> signals{
      {[&](double t) { const double u = t - t0; return (1.0 - 2.0 * b * u * u) * std::exp(-b * u * u); },
       [&](double t) { const double u = t - t0; return std::exp(-b * u * u) * (-2.0 * b * u) * (3.0 - 2.0 * b * u * u); },
       2.0 * w.end_time()},
      {[](double t) { return t * t * std::sin(80.0 * t); },
       [](double t) { return 2.0 * t * std::sin(80.0 * t) + 80.0 * t * t * std::cos(80.0 * t); }, 0.2}};
  for (const auto& sig : signals) {
    for (double th : set.poles) {
      const double dt = std::min(1e-6, 0.5 / -th);
      const auto steps = static_cast<std::size_t>(std::ceil(sig.t_end / dt));
      const auto phi = integrate_phi_ode(sig.dq, th, dt, steps);
      double theta = 0.0;
      for (std::size_t i = 1; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        theta = theta_step(theta, sig.q(t - dt), sig.q(t), dt, th);
        worst = std::max(worst, std::abs(phi[i] - phi_from_theta(sig.q(t), theta)));
      }
    }
  }
  return {worst <= 1e-8, fmt("max |phi_k - (q - Theta_k)| %.2e (<= 1e-8) over %zu poles, 2 signals", worst, set.size())};
}

// ------------------------------------------------------------------- physics

Outcome arrival_time() {
  const PoroelasticParams p = desk_material();
  const Grid2D g{180, 80, 5.0, 5.0, 0.0, 0.0};
  const MaterialField mf(g.nx, g.nz, p);
  const double f0 = 30.0;
  const KernelPair k = fitted_pair(p, f0, 4);
  const std::size_t nc = 8 + k.x.size() + k.z.size();
  SimConfig sim;
  sim.t_final = 0.32;
  const double x_src = 150.0, x1 = 300.0, x2 = 750.0, z = 200.0;
  const ForwardRun run = simulate(mf, g, k, {explosive(x_src, z, f0)},
                                  {receiver(x1, z, nc, {kV1}), receiver(x2, z, nc, {kV1})}, sim);
  const SeismogramSet& tr = run.traces;
  auto cc = [&](long lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < tr.n_samples; ++i)
      c += tr.at(0, i, kV1) * tr.at(1, i + static_cast<std::size_t>(lag), kV1);
    return c;
  };
  long best = 1;
  for (long l = 1; l + 1 < static_cast<long>(tr.n_samples); ++l)
    if (cc(l) > cc(best)) best = l;
  const double ym = cc(best - 1), y0 = cc(best), yp = cc(best + 1);
  const double lag = (static_cast<double>(best) + 0.5 * (ym - yp) / (ym - 2.0 * y0 + yp)) * tr.dt;
  const double c_pf = plane_wave_speeds(p, 1.0, 0.0)[0];
  const double expected = (x2 - x1) / c_pf;
  const double rel = std::abs(lag - expected) / expected;
  return {rel <= 0.02, fmt("moveout %.5f s vs distance/c_pf %.5f s (c_pf %.1f m/s): rel error %.2e (<= 2e-2)", lag,
                           expected, c_pf, rel)};
}

// ----------------------------------------------------------------- inversion

Outcome twin_inversion() {
  Stopwatch sw;
  const PoroelasticParams p = desk_material();
  const std::size_t n = 60;
  const Grid2D g{n, n, 5.0, 5.0, 0.0, 0.0};
  const MaterialField start(n, n, p);
  const KernelPair k = fitted_pair(p, 30.0, 8);
  const std::size_t nc = 8 + k.x.size() + k.z.size();
  SimConfig sim;
  sim.t_final = 0.2;
  sim.boundary.width = 10;
  std::vector<std::vector<SourceSpec>> shots;
  for (double sz : {70.0, 230.0})
    for (double sx : {70.0, 230.0}) shots.push_back({explosive(sx, sz, 30.0)});
  std::vector<ReceiverSpec> recs;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) recs.push_back(receiver(90.0 + 40.0 * i, 90.0 + 40.0 * j, nc, {kV1, kV3, kNegP}));
  Survey sv = make_survey(start, g, k, sim, shots, recs);
  MaterialField truth = start;
  truth.set_param(g.index(30, 31), ParamId::kappa_1, 3e-9);
  synthesize_observed(sv, truth);

  ParameterSelection sel;
  sel.params = {{ParamId::kappa_1, 1e-10, 1e-7, 1e-9}};
  sel.region.assign(g.size(), 0);
  for (std::size_t j = 29; j <= 33; ++j)
    for (std::size_t i = 28; i <= 32; ++i) sel.region[g.index(i, j)] = 1;
  InversionOptions opt;
  opt.max_iterations = 20;
  const InversionResult res = invert(sv, start, sel, opt);
  bool monotone = true;
  for (std::size_t i = 1; i < res.history.size(); ++i) monotone = monotone && res.history[i].chi < res.history[i - 1].chi;
  const double chi0 = res.history.front().chi, chi1 = res.history.back().chi;
  const double reduction = 1.0 - chi1 / chi0;
  const std::size_t iters = res.history.size() - 1;
  const double secs = sw.seconds();
  const double kc = res.model.param(g.index(30, 31), ParamId::kappa_1);
  return {reduction >= 0.9 && iters <= 20 && monotone && secs <= 1800.0,
          fmt("chi %.3e -> %.3e: %.2f%% reduction (>= 90%%) in %zu iterations (<= 20), monotone %s, kappa_1 at the "
              "perturbed cell %.3e (true 3e-9); %.0f s (<= 1800 s)",
              chi0, chi1, 100.0 * reduction, iters, monotone ? "yes" : "NO", kc, secs)};
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const Criterion all[] = {
      {1, "kernel fit accuracy", kernel_fit_accuracy},
      {2, "interpolation exactness", interpolation_exactness},
      {3, "round-trip recovery", round_trip_recovery},
      {4, "energy decay and balance order", energy_decay},
      {5, "conservative limit", conservative_limit},
      {6, "adjoint exactness", adjoint_exactness},
      {7, "gradient correctness", gradient_correctness},
      {8, "drag-term equivalence", drag_equivalence},
      {9, "phi/Theta identity", phi_theta_identity},
      {10, "arrival time", arrival_time},
      {11, "twin inversion", twin_inversion},
  };
  // optional argument: comma-separated criterion numbers
  std::vector<int> only;
  if (argc > 1)
    for (const char* t = std::strtok(argv[1], ","); t; t = std::strtok(nullptr, ",")) only.push_back(std::atoi(t));

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Stopwatch sw;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s [%2d] %-32s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                sw.seconds());
  }
  std::printf("%d criteria failed\n", failed);
  return failed;
}
