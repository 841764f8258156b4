#include "pfwi/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfwi/errors.hpp"

namespace pfwi {

double Ricker::half_support() const {
  // |(1 - 2a) e^{-a}| = 1e-12 with a = (pi f0 tau)^2
  double a = 27.631021115928547;  // -ln(1e-12)
  for (int it = 0; it < 50; ++it) a = 27.631021115928547 + std::log(2.0 * a - 1.0);
  return std::sqrt(a) / (M_PI * f0);
}

double Ricker::operator()(double t) const {
  const double tau = t - delay();
  if (std::abs(tau) > half_support()) return 0.0;
  const double a = M_PI * M_PI * f0 * f0 * tau * tau;
  return amplitude * (1.0 - 2.0 * a) * std::exp(-a);
}

void SeismogramSet::resize(std::size_t nr, std::size_t ns, std::size_t nc) {
  n_samples = ns;
  n_components = nc;
  receivers.resize(nr);
  data.assign(nr * ns * nc, 0.0);
}

std::vector<std::uint8_t> component_mask(std::size_t n_components,
                                         std::initializer_list<std::size_t> fields) {
  std::vector<std::uint8_t> m(n_components, 0);
  for (std::size_t f : fields)
    if (f < n_components) m[f] = 1;
  return m;
}

Discretization resolve_discretization(const MaterialField& base, const Grid2D& grid,
                                      const SimConfig& sim) {
  grid.validate();
  if (!(sim.t_final > 0.0)) throw ValidationError("final time must be positive");
  Discretization d;
  const double limit = cfl_dt(base, grid, 1.0);
  if (sim.dt > 0.0) {
    if (sim.dt > limit * (1.0 + 1e-12))
      throw ValidationError("dt = " + std::to_string(sim.dt) + " exceeds the stability limit " +
                            std::to_string(limit));
    d.dt = sim.dt;
  } else {
    d.dt = cfl_dt(base, grid, sim.cfl_safety);
  }
  d.n_steps = static_cast<std::size_t>(std::ceil(sim.t_final / d.dt - 1e-9));
  if (sim.dt <= 0.0) d.dt = sim.t_final / static_cast<double>(d.n_steps);
  d.sponge_rate = sponge_profile(grid, sim.boundary, max_wave_speed(base));
  return d;
}

namespace {

std::size_t interior_margin(const SimConfig& sim) {
  if (sim.boundary.periodic()) return 0;
  return std::max<std::size_t>(1, sim.boundary.width);
}

}  // namespace

PlacedSource place_source(const Grid2D& g, const SourceSpec& s, const Discretization& disc,
                          bool periodic, std::size_t margin) {
  if (!(s.wavelet.f0 > 0.0)) throw ValidationError("source f0 must be positive");
  PlacedSource ps;
  ps.channel = s.channel;
  ps.c1 = s.c1;
  ps.c2 = s.c2;
  if (s.channel == SourceChannel::force) {
    ps.stencil[0] = bilinear_stencil(g, NodeSet::X, s.x, s.z, periodic, margin);
    ps.stencil[1] = bilinear_stencil(g, NodeSet::Z, s.x, s.z, periodic, margin);
  } else {
    ps.stencil[0] = bilinear_stencil(g, NodeSet::C, s.x, s.z, periodic, margin);
    ps.stencil[1] = ps.stencil[0];
  }
  ps.amp.resize(2 * disc.n_steps + 1);
  for (std::size_t m = 0; m < ps.amp.size(); ++m)
    ps.amp[m] = s.wavelet(0.5 * static_cast<double>(m) * disc.dt);
  return ps;
}

PlacedReceiver place_receiver(const Grid2D& g, const ReceiverSpec& r, std::size_t n_components,
                              bool periodic, std::size_t margin) {
  PlacedReceiver pr;
  const NodeSet sets[4] = {NodeSet::C, NodeSet::X, NodeSet::Z, NodeSet::XZ};
  for (NodeSet s : sets) pr.stencil[kernels::set_slot(s)] = bilinear_stencil(g, s, r.x, r.z, periodic, margin);
  pr.mask = r.mask;
  if (pr.mask.empty()) pr.mask = component_mask(n_components, {kV1, kV3});
  if (pr.mask.size() != n_components)
    throw ValidationError("receiver mask has " + std::to_string(pr.mask.size()) +
                          " entries, expected " + std::to_string(n_components));
  return pr;
}

ForwardProblem build_problem(const MaterialField& mf, const Grid2D& grid, const KernelPair& k,
                             const std::vector<SourceSpec>& sources,
                             const std::vector<ReceiverSpec>& receivers, const SimConfig& sim,
                             const Discretization& disc) {
  ForwardProblem fp;
  fp.grid = grid;
  fp.sim = sim;
  fp.disc = disc;
  const bool per = sim.boundary.periodic();
  fp.ops = assemble_system(mf, grid, k, disc, per);
  const std::size_t margin = interior_margin(sim);
  for (const auto& s : sources) fp.sources.push_back(place_source(grid, s, disc, per, margin));
  for (const auto& r : receivers) {
    fp.receivers.push_back(place_receiver(grid, r, fp.ops.n_fields(), per, margin));
    fp.receiver_specs.push_back(r);
    fp.receiver_specs.back().mask = fp.receivers.back().mask;
  }
  return fp;
}

void spread_field(double* u, std::size_t n_nodes, std::size_t f, const Stencil4& st, double amp) {
  double* a = u + f * n_nodes;
  for (int q = 0; q < 4; ++q) a[st.idx[q]] += st.w[q] * amp;
}

double sample_field(const double* u, std::size_t n_nodes, std::size_t f, const Stencil4& st) {
  const double* a = u + f * n_nodes;
  double s = 0.0;
  for (int q = 0; q < 4; ++q) s += st.w[q] * a[st.idx[q]];
  return s;
}

void GradientAccumulator::reset(std::size_t nodes, std::size_t n1_, std::size_t n3_) {
  n1 = n1_;
  n3 = n3_;
  inv_x.assign(4 * nodes, 0.0);
  inv_z.assign(4 * nodes, 0.0);
  inv_c.assign(9 * nodes, 0.0);
  inv_xz.assign(nodes, 0.0);
  src_c.assign(4 * nodes, 0.0);
  exp_x.assign((2 + n1) * (2 + n1) * nodes, 0.0);
  exp_z.assign((2 + n3) * (2 + n3) * nodes, 0.0);
}

Stepper::Stepper(const ForwardProblem& fp)
    : fp_(fp), kv_(fp.ops.view()), nodes_(fp.grid.size()), nf_(fp.ops.n_fields()),
      nt_(kTransportFields * fp.grid.size()) {
  a_.resize(nt_);
  y_.resize(nt_);
  k_.resize(nt_);
  b_.resize(nt_);
}

void Stepper::transport(const double* u, double* z) const {
  if (fp_.sim.backend == Backend::serial) kernels::serial::transport(kv_, u, z);
  else kernels::omp::transport(kv_, u, z);
}

void Stepper::inv_mass(double* z) const {
  if (fp_.sim.backend == Backend::serial) kernels::serial::inv_mass(kv_, z);
  else kernels::omp::inv_mass(kv_, z);
}

void Stepper::local(double* u, bool transpose) const {
  if (fp_.sim.backend == Backend::serial) kernels::serial::local(kv_, u, transpose);
  else kernels::omp::local(kv_, u, transpose);
}

void Stepper::add_sources(double* z, std::size_t m) const {
  const double area = 1.0 / (fp_.grid.dx * fp_.grid.dz);
  const auto& c2inv_tab = fp_.ops.unique[kernels::set_slot(NodeSet::C)];
  const auto* cidx = fp_.ops.tables[kernels::set_slot(NodeSet::C)].index.data();
  for (const auto& s : fp_.sources) {
    const double a = s.amp[m] * area;
    if (a == 0.0) continue;
    if (s.channel == SourceChannel::force) {
      if (s.c1 != 0.0) spread_field(z, nodes_, kV1, s.stencil[0], a * s.c1);
      if (s.c2 != 0.0) spread_field(z, nodes_, kV3, s.stencil[1], a * s.c2);
    } else {
      for (int q = 0; q < 4; ++q) {
        const std::size_t p = s.stencil[0].idx[q];
        const double w = s.stencil[0].w[q] * a;
        if (w == 0.0) continue;
        const Eigen::Matrix2d& ci = c2inv_tab[cidx[p]].c2_inv;
        z[kTau11 * nodes_ + p] += w * (ci(0, 0) * s.c1 + ci(0, 1) * s.c2);
        z[kTau33 * nodes_ + p] += w * (ci(1, 0) * s.c1 + ci(1, 1) * s.c2);
      }
    }
  }
}

namespace {

[[noreturn]] void report_instability(const double* u, std::size_t nodes, std::size_t n1,
                                     const Grid2D& g, double t) {
  std::size_t bad = 0;
  while (std::isfinite(u[bad])) ++bad;
  const std::size_t f = bad / nodes, p = bad % nodes;
  std::ostringstream msg;
  msg << "non-finite " << field_name(f, n1) << " at node (" << p % g.nx << ", " << p / g.nx
      << ") at t = " << t;
  throw Instability(msg.str());
}

}  // namespace

void Stepper::step(double* u, std::size_t n) {
  const double h = fp_.disc.dt;
  const bool omp = fp_.sim.backend == Backend::omp;
  auto axpy = omp ? kernels::omp::axpy : kernels::serial::axpy;

  local(u, false);
  std::copy(u, u + nt_, a_.begin());
  const double* a = a_.data();

  transport(a, k_.data());
  add_sources(k_.data(), 2 * n);
  inv_mass(k_.data());
  axpy(nt_, h / 6.0, k_.data(), a, b_.data());
  axpy(nt_, 0.5 * h, k_.data(), a, y_.data());

  transport(y_.data(), k_.data());
  add_sources(k_.data(), 2 * n + 1);
  inv_mass(k_.data());
  axpy(nt_, h / 3.0, k_.data(), b_.data(), b_.data());
  axpy(nt_, 0.5 * h, k_.data(), a, y_.data());

  transport(y_.data(), k_.data());
  add_sources(k_.data(), 2 * n + 1);
  inv_mass(k_.data());
  axpy(nt_, h / 3.0, k_.data(), b_.data(), b_.data());
  axpy(nt_, h, k_.data(), a, y_.data());

  transport(y_.data(), k_.data());
  add_sources(k_.data(), 2 * n + 2);
  inv_mass(k_.data());
  axpy(nt_, h / 6.0, k_.data(), b_.data(), u);

  local(u, false);
  if (!fp_.ops.periodic) {
    if (omp) kernels::omp::zero_ring(kv_, u, nf_);
    else kernels::serial::zero_ring(kv_, u, nf_);
  }
  const bool finite = omp ? kernels::omp::all_finite(u, nf_ * nodes_)
                          : kernels::serial::all_finite(u, nf_ * nodes_);
  if (!finite) report_instability(u, nodes_, fp_.ops.n1, fp_.grid, (n + 1) * h);
}

namespace {

// acc[p](r, c) += s * x_r * y_c over the (v, q, Theta) block of one axis.
void accumulate_block(std::vector<double>& acc, const double* x, const double* y, const double* damp,
                      std::size_t nodes, std::size_t fv, std::size_t fq, std::size_t th0,
                      std::size_t nk) {
  const std::size_t m = 2 + nk;
  const long nn = static_cast<long>(nodes);
#pragma omp parallel for schedule(static)
  for (long pl = 0; pl < nn; ++pl) {
    const std::size_t p = static_cast<std::size_t>(pl);
    double xv[2 + 64], yv[2 + 64];
    std::vector<double> xh, yh;
    double* xs = xv;
    double* ys = yv;
    if (m > 66) {
      xh.resize(m);
      yh.resize(m);
      xs = xh.data();
      ys = yh.data();
    }
    xs[0] = x[fv * nodes + p];
    xs[1] = x[fq * nodes + p];
    ys[0] = y[fv * nodes + p];
    ys[1] = y[fq * nodes + p];
    for (std::size_t k = 0; k < nk; ++k) {
      xs[2 + k] = x[(th0 + k) * nodes + p];
      ys[2 + k] = y[(th0 + k) * nodes + p];
    }
    const double s = damp ? damp[p] : 1.0;
    double* A = acc.data() + m * m * p;
    for (std::size_t r = 0; r < m; ++r) {
      const double xr = s * xs[r];
      if (xr == 0.0) continue;
      for (std::size_t c = 0; c < m; ++c) A[r * m + c] += xr * ys[c];
    }
  }
}

}  // namespace

void Stepper::step_adjoint(double* lam, std::size_t n, const double* u_n, GradientAccumulator* acc,
                           std::vector<std::vector<double>>* amp_bar) {
  const double h = fp_.disc.dt;
  const bool omp = fp_.sim.backend == Backend::omp;
  auto axpy = omp ? kernels::omp::axpy : kernels::serial::axpy;
  const std::size_t N = nodes_;
  const std::size_t n1 = fp_.ops.n1, n3 = fp_.ops.n3;
  const std::size_t th1 = kThetaBase, th3 = kThetaBase + n1;
  const double* spx = kv_.sponge[kernels::set_slot(NodeSet::X)];
  const double* spz = kv_.sponge[kernels::set_slot(NodeSet::Z)];

  // forward stages of this step (only when the parameter gradient is wanted)
  std::vector<double> bfull;
  if (acc) {
    for (auto& z : zraw_) z.resize(nt_);
    u0_.assign(u_n, u_n + nf_ * N);
    std::vector<double> afull(u0_);
    local(afull.data(), false);
    const double* a = afull.data();
    const std::size_t mstage[4] = {2 * n, 2 * n + 1, 2 * n + 1, 2 * n + 2};
    const double ystep[3] = {0.5 * h, 0.5 * h, h};
    const double bw[4] = {h / 6.0, h / 3.0, h / 3.0, h / 6.0};
    std::copy(a, a + nt_, b_.begin());
    const double* y = a;
    for (int s = 0; s < 4; ++s) {
      transport(y, zraw_[s].data());
      add_sources(zraw_[s].data(), mstage[s]);
      std::copy(zraw_[s].begin(), zraw_[s].end(), k_.begin());
      inv_mass(k_.data());
      axpy(nt_, bw[s], k_.data(), b_.data(), b_.data());
      if (s < 3) {
        axpy(nt_, ystep[s], k_.data(), a, y_.data());
        y = y_.data();
      }
    }
    bfull = std::move(afull);
    std::copy(b_.begin(), b_.end(), bfull.begin());
  }

  // c_bar = P lam
  if (!fp_.ops.periodic) {
    if (omp) kernels::omp::zero_ring(kv_, lam, nf_);
    else kernels::serial::zero_ring(kv_, lam, nf_);
  }
  if (acc) {
    accumulate_block(acc->exp_x, lam, bfull.data(), spx, N, kV1, kQ1, th1, n1);
    accumulate_block(acc->exp_z, lam, bfull.data(), spz, N, kV3, kQ3, th3, n3);
  }
  local(lam, true);  // lam now holds b_bar
  ab_.assign(lam, lam + nf_ * N);  // a_bar accumulates on top of b_bar

  kb_.resize(nt_);
  g_.resize(nt_);
  yb_.assign(nt_, 0.0);
  const double bcoef[4] = {h / 6.0, h / 3.0, h / 3.0, h / 6.0};
  const double ycoef[4] = {0.0, 0.5 * h, 0.5 * h, h};  // weight of y_bar_{s+1} in k_bar_s
  const std::size_t mstage[4] = {2 * n, 2 * n + 1, 2 * n + 1, 2 * n + 2};
  const double area = 1.0 / (fp_.grid.dx * fp_.grid.dz);
  const auto& cuniq = fp_.ops.unique[kernels::set_slot(NodeSet::C)];
  const auto* cidx = fp_.ops.tables[kernels::set_slot(NodeSet::C)].index.data();

  for (int s = 3; s >= 0; --s) {
    // k_bar_s = bcoef b_bar + ycoef y_bar_{s+1}
    if (s == 3) {
      for (std::size_t q = 0; q < nt_; ++q) kb_[q] = bcoef[s] * lam[q];
    } else {
      for (std::size_t q = 0; q < nt_; ++q) kb_[q] = bcoef[s] * lam[q] + ycoef[s + 1] * yb_[q];
    }
    if (acc) {
      const double* z = zraw_[s].data();
      const long nn = static_cast<long>(N);
#pragma omp parallel for schedule(static)
      for (long pl = 0; pl < nn; ++pl) {
        const std::size_t p = static_cast<std::size_t>(pl);
        const double kx[2] = {kb_[kV1 * N + p], kb_[kQ1 * N + p]};
        const double zx[2] = {z[kV1 * N + p], z[kQ1 * N + p]};
        const double kz[2] = {kb_[kV3 * N + p], kb_[kQ3 * N + p]};
        const double zz[2] = {z[kV3 * N + p], z[kQ3 * N + p]};
        const double kc[3] = {kb_[kTau11 * N + p], kb_[kTau33 * N + p], kb_[kNegP * N + p]};
        const double zc[3] = {z[kTau11 * N + p], z[kTau33 * N + p], z[kNegP * N + p]};
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c) {
            acc->inv_x[4 * p + 2 * r + c] += kx[r] * zx[c];
            acc->inv_z[4 * p + 2 * r + c] += kz[r] * zz[c];
          }
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) acc->inv_c[9 * p + 3 * r + c] += kc[r] * zc[c];
        acc->inv_xz[p] += kb_[kTau13 * N + p] * z[kTau13 * N + p];
      }
    }
    std::copy(kb_.begin(), kb_.end(), g_.begin());
    inv_mass(g_.data());

    for (std::size_t si = 0; si < fp_.sources.size(); ++si) {
      const auto& src = fp_.sources[si];
      const double amp = src.amp[mstage[s]] * area;
      double dot = 0.0;  // <g, dS/d amp>
      if (src.channel == SourceChannel::force) {
        if (src.c1 != 0.0) dot += src.c1 * sample_field(g_.data(), N, kV1, src.stencil[0]);
        if (src.c2 != 0.0) dot += src.c2 * sample_field(g_.data(), N, kV3, src.stencil[1]);
      } else {
        for (int q = 0; q < 4; ++q) {
          const std::size_t p = src.stencil[0].idx[q];
          const double w = src.stencil[0].w[q];
          if (w == 0.0) continue;
          const double g0 = g_[kTau11 * N + p], g1 = g_[kTau33 * N + p];
          const Eigen::Matrix2d& ci = cuniq[cidx[p]].c2_inv;
          dot += w * (g0 * (ci(0, 0) * src.c1 + ci(0, 1) * src.c2) +
                      g1 * (ci(1, 0) * src.c1 + ci(1, 1) * src.c2));
          if (acc && amp != 0.0) {
            const double f[2] = {w * amp * src.c1, w * amp * src.c2};
            const double gg[2] = {g0, g1};
            for (int r = 0; r < 2; ++r)
              for (int c = 0; c < 2; ++c) acc->src_c[4 * p + 2 * r + c] += gg[r] * f[c];
          }
        }
      }
      if (amp_bar) (*amp_bar)[si][mstage[s]] += dot * area;
    }

    // y_bar_s = -B1 g
    transport(g_.data(), yb_.data());
    for (std::size_t q = 0; q < nt_; ++q) {
      yb_[q] = -yb_[q];
      ab_[q] += yb_[q];
    }
  }

  if (acc) {
    accumulate_block(acc->exp_x, ab_.data(), u0_.data(), spx, N, kV1, kQ1, th1, n1);
    accumulate_block(acc->exp_z, ab_.data(), u0_.data(), spz, N, kV3, kQ3, th3, n3);
  }
  local(ab_.data(), true);
  std::copy(ab_.begin(), ab_.end(), lam);
}

namespace {

void record(const ForwardProblem& fp, const double* u, SeismogramSet& tr, std::size_t n) {
  const std::size_t N = fp.grid.size();
  const std::size_t nc = tr.n_components;
  for (std::size_t r = 0; r < fp.receivers.size(); ++r) {
    const auto& rc = fp.receivers[r];
    for (std::size_t c = 0; c < nc; ++c) {
      if (!rc.mask[c]) continue;
      const auto& st = rc.stencil[kernels::set_slot(field_nodes(c, fp.ops.n1))];
      tr.at(r, n, c) = sample_field(u, N, c, st);
    }
  }
}

}  // namespace

ForwardRun run_forward(const ForwardProblem& fp) {
  ForwardRun run;
  const std::size_t N = fp.disc.n_steps;
  run.n_steps = N;
  run.dt = fp.disc.dt;
  run.traces.dt = fp.disc.dt;
  run.traces.resize(fp.receivers.size(), N + 1, fp.n_components());
  run.traces.receivers = fp.receiver_specs;
  run.checkpoint_every = fp.sim.checkpoint_every
                             ? fp.sim.checkpoint_every
                             : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(N))));

  Wavefield w(fp.grid, fp.ops.n1, fp.ops.n3);
  Stepper stepper(fp);
  double t_src_end = 0.0;
  for (const auto& s : fp.sources) {
    std::size_t last = 0;
    for (std::size_t m = 0; m < s.amp.size(); ++m)
      if (s.amp[m] != 0.0) last = m;
    t_src_end = std::max(t_src_end, 0.5 * static_cast<double>(last + 1) * fp.disc.dt);
  }
  run.ledger.source_end = t_src_end;

  auto observe = [&](std::size_t n) {
    w.time = static_cast<double>(n) * fp.disc.dt;
    record(fp, w.ptr(), run.traces, n);
    if (n % run.checkpoint_every == 0) run.checkpoints.push_back(w.data());
    if (fp.sim.snapshot_every && n % fp.sim.snapshot_every == 0) run.snapshots.push_back(w);
    if (fp.sim.energy_every && (n % fp.sim.energy_every == 0 || n == N))
      run.ledger.append(w.time, energy_parts(fp.ops, w.ptr()));
  };

  observe(0);
  for (std::size_t n = 0; n < N; ++n) {
    stepper.step(w.ptr(), n);
    observe(n + 1);
  }
  return run;
}

ForwardRun simulate(const MaterialField& mf, const Grid2D& grid, const KernelPair& k,
                    const std::vector<SourceSpec>& sources,
                    const std::vector<ReceiverSpec>& receivers, const SimConfig& sim) {
  const Discretization disc = resolve_discretization(mf, grid, sim);
  const ForwardProblem fp = build_problem(mf, grid, k, sources, receivers, sim, disc);
  return run_forward(fp);
}

}  // namespace pfwi
