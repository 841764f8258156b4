#include "pfwi/adjoint.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pfwi/errors.hpp"

namespace pfwi {

SeismogramSet residual_sources(const SeismogramSet& sim, const SeismogramSet& obs) {
  if (sim.n_receivers() != obs.n_receivers() || sim.n_samples != obs.n_samples ||
      sim.n_components != obs.n_components)
    throw GeometryMismatch("simulated and observed traces have different shapes");
  if (std::abs(sim.dt - obs.dt) > 1e-12 * std::max(std::abs(sim.dt), std::abs(obs.dt)))
    throw GeometryMismatch("simulated and observed traces have different dt");
  for (std::size_t r = 0; r < sim.n_receivers(); ++r) {
    const auto& a = sim.receivers[r];
    const auto& b = obs.receivers[r];
    if (a.x != b.x || a.z != b.z || a.mask != b.mask)
      throw GeometryMismatch("receiver " + std::to_string(r) + " differs between traces");
  }
  SeismogramSet res = sim;
  for (std::size_t r = 0; r < sim.n_receivers(); ++r) {
    const auto& mask = sim.receivers[r].mask;
    for (std::size_t n = 0; n < sim.n_samples; ++n)
      for (std::size_t c = 0; c < sim.n_components; ++c)
        res.at(r, n, c) = mask[c] ? sim.at(r, n, c) - obs.at(r, n, c) : 0.0;
  }
  return res;
}

std::vector<double> trapezoid_weights(std::size_t n, double dt) {
  std::vector<double> w(n, dt);
  if (n > 0) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  if (n == 1) w[0] = 0.0;
  return w;
}

namespace {

void inject(const ForwardProblem& fp, const SeismogramSet& res, double weight, std::size_t n,
            double* lam) {
  if (weight == 0.0) return;
  const std::size_t N = fp.grid.size();
  for (std::size_t r = 0; r < fp.receivers.size(); ++r) {
    const auto& rc = fp.receivers[r];
    for (std::size_t c = 0; c < res.n_components; ++c) {
      if (!rc.mask[c]) continue;
      const double v = res.at(r, n, c);
      if (v == 0.0) continue;
      spread_field(lam, N, c, rc.stencil[kernels::set_slot(field_nodes(c, fp.ops.n1))], weight * v);
    }
  }
}

}  // namespace

AdjointRun run_adjoint(const ForwardProblem& fp, const ForwardRun& fwd, const SeismogramSet& residual,
                       const std::vector<double>& weights, const AdjointOptions& opt) {
  const std::size_t N = fp.disc.n_steps;
  if (fwd.n_steps != N || fwd.checkpoints.empty() || fwd.checkpoint_every == 0)
    throw MissingForwardRun("adjoint needs the forward run of the same problem");
  if (residual.n_samples != N + 1 || weights.size() != N + 1 ||
      residual.n_receivers() != fp.receivers.size() || residual.n_components != fp.n_components())
    throw GeometryMismatch("residual traces do not match the forward problem");

  AdjointRun out;
  Stepper stepper(fp);
  const std::size_t S = stepper.state_size();
  std::vector<double> lam(S, 0.0);
  if (opt.accumulate_gradient) out.acc.reset(fp.grid.size(), fp.ops.n1, fp.ops.n3);
  if (opt.source_adjoint)
    for (const auto& s : fp.sources) out.amp_bar.emplace_back(s.amp.size(), 0.0);

  auto snapshot = [&](std::size_t n) {
    if (opt.snapshot_every && n % opt.snapshot_every == 0) {
      Wavefield w(fp.grid, fp.ops.n1, fp.ops.n3);
      std::copy(lam.begin(), lam.end(), w.data().begin());
      w.time = static_cast<double>(n) * fp.disc.dt;
      out.snapshots.push_back(std::move(w));
    }
  };

  inject(fp, residual, weights[N], N, lam.data());
  snapshot(N);

  const std::size_t K = fwd.checkpoint_every;
  std::vector<std::vector<double>> seg;  // forward states of the current segment
  std::size_t seg_start = 0;
  bool have_seg = false;
  for (std::size_t n = N; n-- > 0;) {
    const double* u_n = nullptr;
    if (opt.accumulate_gradient) {
      const std::size_t start = (n / K) * K;
      if (!have_seg || start != seg_start) {
        const std::size_t ck = n / K;
        if (ck >= fwd.checkpoints.size()) throw MissingForwardRun("checkpoint missing");
        seg.assign(1, fwd.checkpoints[ck]);
        for (std::size_t m = start; m < n; ++m) {
          seg.push_back(seg.back());
          stepper.step(seg.back().data(), m);
        }
        seg_start = start;
        have_seg = true;
      }
      u_n = seg[n - seg_start].data();
    }
    stepper.step_adjoint(lam.data(), n, u_n, opt.accumulate_gradient ? &out.acc : nullptr,
                         opt.source_adjoint ? &out.amp_bar : nullptr);
    inject(fp, residual, weights[n], n, lam.data());
    for (double v : lam)
      if (!std::isfinite(v)) throw Instability("non-finite adjoint state at step " + std::to_string(n));
    snapshot(n);
  }
  for (double v : lam) out.max_abs_final = std::max(out.max_abs_final, std::abs(v));
  return out;
}

DotProductResult dot_product_test(const ForwardProblem& fp_in, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);

  ForwardProblem fp = fp_in;
  if (fp.sources.empty()) throw ValidationError("dot-product test needs at least one source");
  if (fp.receivers.empty()) throw ValidationError("dot-product test needs at least one receiver");
  for (auto& s : fp.sources)
    for (double& a : s.amp) a = nd(rng);

  const ForwardRun fwd = run_forward(fp);
  SeismogramSet v = fwd.traces;
  for (std::size_t r = 0; r < v.n_receivers(); ++r)
    for (std::size_t n = 0; n < v.n_samples; ++n)
      for (std::size_t c = 0; c < v.n_components; ++c)
        v.at(r, n, c) = fp.receivers[r].mask[c] ? nd(rng) : 0.0;

  AdjointOptions opt;
  opt.accumulate_gradient = false;
  opt.source_adjoint = true;
  const AdjointRun adj = run_adjoint(fp, fwd, v, std::vector<double>(v.n_samples, 1.0), opt);

  DotProductResult res;
  double nfu = 0.0, nv = 0.0;
  for (std::size_t q = 0; q < v.data.size(); ++q) {
    res.forward_side += fwd.traces.data[q] * v.data[q];
    nfu += fwd.traces.data[q] * fwd.traces.data[q];
    nv += v.data[q] * v.data[q];
  }
  for (std::size_t s = 0; s < fp.sources.size(); ++s)
    for (std::size_t m = 0; m < fp.sources[s].amp.size(); ++m)
      res.adjoint_side += fp.sources[s].amp[m] * adj.amp_bar[s][m];
  res.discrepancy = std::abs(res.forward_side - res.adjoint_side) / (std::sqrt(nfu) * std::sqrt(nv));
  return res;
}

}  // namespace pfwi
