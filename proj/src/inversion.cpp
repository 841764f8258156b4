#include "pfwi/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "pfwi/errors.hpp"

namespace pfwi {

double misfit(const SeismogramSet& sim, const SeismogramSet& obs) {
  const SeismogramSet res = residual_sources(sim, obs);
  const std::vector<double> w = trapezoid_weights(res.n_samples, res.dt);
  double chi = 0.0;
  for (std::size_t r = 0; r < res.n_receivers(); ++r)
    for (std::size_t n = 0; n < res.n_samples; ++n) {
      double s = 0.0;
      for (std::size_t c = 0; c < res.n_components; ++c) s += res.at(r, n, c) * res.at(r, n, c);
      chi += 0.5 * w[n] * s;
    }
  return chi;
}

void ParameterSelection::validate(std::size_t n_cells) const {
  std::vector<std::string> bad;
  if (params.empty()) bad.push_back("no parameters selected");
  for (const auto& b : params) {
    const std::string name(param_name(b.id));
    if (!is_invertible(b.id)) bad.push_back(name + " cannot be inverted");
    if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper))
      bad.push_back(name + ": bounds must be finite with lower < upper");
    if (!(b.scale > 0.0) || !std::isfinite(b.scale)) bad.push_back(name + ": scale must be > 0");
  }
  if (!region.empty() && region.size() != n_cells)
    bad.push_back("region mask has " + std::to_string(region.size()) + " cells, expected " +
                  std::to_string(n_cells));
  if (!bad.empty()) {
    std::string msg = "invalid parameter selection:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ValidationError(msg);
  }
}

void GradientField::reset(const Grid2D& g, const ParameterSelection& sel) {
  grid = g;
  params.clear();
  for (const auto& b : sel.params) params.push_back(b.id);
  values.assign(params.size(), std::vector<double>(g.size(), 0.0));
}

double GradientField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values)
    for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

namespace {

struct NodeDerivative {
  Eigen::Matrix2d mv_inv[2];
  Eigen::Matrix3d e3;
  Eigen::Matrix2d c2_inv;
  double c55 = 0.0;
  Eigen::MatrixXd expo[2];
};

// Derivative of the Frechet-differentiable map p -> node blocks by central
// differences, and of the local exponential through the block-triangular
// exponential of [[G, dG], [0, G]].
NodeDerivative node_derivative(const PoroelasticParams& p, ParamId id, const KernelPair& k,
                               double half_dt, const NodeMatrices& base) {
  const double v = get_param(p, id);
  const double h = 1e-6 * (v != 0.0 ? std::abs(v) : 1.0);
  PoroelasticParams pp = p, pm = p;
  set_param(pp, id, v + h);
  set_param(pm, id, v - h);
  const NodeMatrices a = node_matrices(pp, k), b = node_matrices(pm, k);
  const double inv2h = 1.0 / (2.0 * h);
  NodeDerivative d;
  for (int j = 0; j < 2; ++j) {
    d.mv_inv[j] = (a.mv_inv[j] - b.mv_inv[j]) * inv2h;
    const Eigen::MatrixXd dg = (a.gen[j] - b.gen[j]) * inv2h;
    const Eigen::Index m = dg.rows();
    Eigen::MatrixXd blk = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    blk.topLeftCorner(m, m) = base.gen[j] * half_dt;
    blk.bottomRightCorner(m, m) = base.gen[j] * half_dt;
    blk.topRightCorner(m, m) = dg * half_dt;
    const Eigen::MatrixXd e = blk.exp();
    d.expo[j] = e.topRightCorner(m, m);
  }
  d.e3 = (a.e3 - b.e3) * inv2h;
  d.c2_inv = (a.c2_inv - b.c2_inv) * inv2h;
  d.c55 = (a.c55 - b.c55) * inv2h;
  return d;
}

}  // namespace

void accumulate_gradient(const ForwardProblem& fp, const GradientAccumulator& acc,
                         const ParameterSelection& sel, GradientField& g) {
  const Grid2D& grid = fp.grid;
  const SystemOperators& ops = fp.ops;
  const std::size_t N = grid.size();
  if (g.values.size() != sel.params.size() || g.grid.size() != N)
    throw GeometryMismatch("gradient field does not match the selection/grid");
  if (acc.inv_c.size() != 9 * N) throw MissingForwardRun("gradient accumulators are empty");
  const double half_dt = 0.5 * ops.dt;
  const NodeSet sets[4] = {NodeSet::C, NodeSet::X, NodeSet::Z, NodeSet::XZ};

  for (std::size_t k = 0; k < sel.params.size(); ++k) {
    const ParamId id = sel.params[k].id;
    std::vector<double>& out = g.values[k];
    for (NodeSet s : sets) {
      const std::size_t slot = kernels::set_slot(s);
      const NodeTable& tab = ops.tables[slot];
      const std::size_t nu = tab.params.size();
      std::vector<NodeDerivative> der(nu);
      std::vector<std::uint8_t> needed(nu, 0);
      // only materials touching the region matter
      for (std::size_t j = 0; j < grid.nz; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i) {
          const std::size_t p = grid.index(i, j);
          if (needed[tab.index[p]]) continue;
          for (const auto& [c, w] : node_cells(grid, s, i, j, ops.periodic))
            if (sel.in_region(c) && w != 0.0) needed[tab.index[p]] = 1;
        }
      const long nul = static_cast<long>(nu);
#pragma omp parallel for schedule(dynamic)
      for (long ul = 0; ul < nul; ++ul) {
        const std::size_t u = static_cast<std::size_t>(ul);
        if (needed[u]) der[u] = node_derivative(tab.params[u], id, ops.kernels, half_dt, ops.unique[slot][u]);
      }

      for (std::size_t j = 0; j < grid.nz; ++j)
        for (std::size_t i = 0; i < grid.nx; ++i) {
          const std::size_t p = grid.index(i, j);
          const std::size_t u = tab.index[p];
          if (!needed[u]) continue;
          const NodeDerivative& d = der[u];
          double val = 0.0;
          switch (s) {
            case NodeSet::X:
            case NodeSet::Z: {
              const int ax = s == NodeSet::X ? 0 : 1;
              const auto& inv = ax == 0 ? acc.inv_x : acc.inv_z;
              const auto& ex = ax == 0 ? acc.exp_x : acc.exp_z;
              for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) val += inv[4 * p + 2 * r + c] * d.mv_inv[ax](r, c);
              const std::size_t m = static_cast<std::size_t>(d.expo[ax].rows());
              const double* A = ex.data() + m * m * p;
              for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) val += A[r * m + c] * d.expo[ax](r, c);
              break;
            }
            case NodeSet::C:
              for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) val += acc.inv_c[9 * p + 3 * r + c] * d.e3(r, c);
              for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) val += acc.src_c[4 * p + 2 * r + c] * d.c2_inv(r, c);
              break;
            case NodeSet::XZ:
              val = acc.inv_xz[p] * d.c55;
              break;
          }
          if (val == 0.0) continue;
          for (const auto& [c, w] : node_cells(grid, s, i, j, ops.periodic))
            if (sel.in_region(c)) out[c] += w * val;
        }
    }
  }
}

Survey make_survey(const MaterialField& base, const Grid2D& grid, const KernelPair& k,
                   const SimConfig& sim, const std::vector<std::vector<SourceSpec>>& shots,
                   const std::vector<ReceiverSpec>& receivers) {
  Survey s;
  s.grid = grid;
  s.kernels = k;
  s.sim = sim;
  s.disc = resolve_discretization(base, grid, sim);
  s.receivers = receivers;
  for (const auto& src : shots) s.shots.push_back({src, {}});
  return s;
}

void synthesize_observed(Survey& survey, const MaterialField& truth) {
  for (auto& shot : survey.shots) {
    const ForwardProblem fp =
        build_problem(truth, survey.grid, survey.kernels, shot.sources, survey.receivers, survey.sim, survey.disc);
    shot.observed = run_forward(fp).traces;
  }
}

Evaluation evaluate(const Survey& survey, const MaterialField& mf, const ParameterSelection* sel) {
  Evaluation ev;
  if (sel) ev.gradient.reset(survey.grid, *sel);
  for (const auto& shot : survey.shots) {
    const ForwardProblem fp =
        build_problem(mf, survey.grid, survey.kernels, shot.sources, survey.receivers, survey.sim, survey.disc);
    const ForwardRun fwd = run_forward(fp);
    ev.chi += misfit(fwd.traces, shot.observed);
    if (!sel) continue;
    const SeismogramSet res = residual_sources(fwd.traces, shot.observed);
    AdjointOptions opt;
    const AdjointRun adj = run_adjoint(fp, fwd, res, trapezoid_weights(res.n_samples, res.dt), opt);
    accumulate_gradient(fp, adj.acc, *sel, ev.gradient);
  }
  return ev;
}

GradientCheck fd_gradient_check(const Survey& survey, const MaterialField& mf,
                                const ParameterSelection& sel, std::size_t n_probes,
                                std::uint64_t seed, double fd_step, double min_fraction) {
  sel.validate(mf.size());
  const Evaluation ev = evaluate(survey, mf, &sel);
  std::mt19937_64 rng(seed);
  GradientCheck out;
  for (std::size_t q = 0; q < n_probes; ++q) {
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, sel.params.size() - 1)(rng);
    const auto& g = ev.gradient.values[k];
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < g.size(); ++c)
      if (sel.in_region(c) && std::abs(g[c]) >= min_fraction * gmax && gmax > 0.0) pool.push_back(c);
    if (pool.empty()) throw ValidationError("no cell has a usable gradient for the check");
    const std::size_t cell = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];

    const ParamId id = sel.params[k].id;
    const double h = fd_step * sel.params[k].scale;
    const double v = mf.param(cell, id);
    MaterialField plus = mf, minus = mf;
    plus.set_param(cell, id, v + h);
    minus.set_param(cell, id, v - h);
    const double fd = (evaluate(survey, plus, nullptr).chi - evaluate(survey, minus, nullptr).chi) / (2.0 * h);

    GradientProbe pr;
    pr.cell = cell;
    pr.id = id;
    pr.adjoint = g[cell];
    pr.finite_difference = fd;
    pr.rel_error = std::abs(pr.adjoint - fd) / std::max(std::abs(fd), 1e-300);
    out.max_rel_error = std::max(out.max_rel_error, pr.rel_error);
    out.probes.push_back(pr);
  }
  return out;
}

std::string status_name(InversionStatus s) {
  switch (s) {
    case InversionStatus::converged: return "converged";
    case InversionStatus::max_iterations: return "max_iterations";
    case InversionStatus::line_search_failure: return "line_search_failure";
  }
  return "?";
}

namespace {

std::vector<std::size_t> region_cells(const ParameterSelection& sel, std::size_t n) {
  std::vector<std::size_t> c;
  for (std::size_t i = 0; i < n; ++i)
    if (sel.in_region(i)) c.push_back(i);
  return c;
}

}  // namespace

InversionResult invert(const Survey& survey, const MaterialField& initial,
                       const ParameterSelection& sel, const InversionOptions& opt) {
  sel.validate(initial.size());
  const std::vector<std::size_t> cells = region_cells(sel, initial.size());
  const std::size_t np = sel.params.size(), nc = cells.size();

  auto to_x = [&](const MaterialField& mf) {
    std::vector<double> x(np * nc);
    for (std::size_t k = 0; k < np; ++k)
      for (std::size_t i = 0; i < nc; ++i)
        x[k * nc + i] = mf.param(cells[i], sel.params[k].id) / sel.params[k].scale;
    return x;
  };
  auto to_model = [&](const std::vector<double>& x, MaterialField mf) {
    for (std::size_t k = 0; k < np; ++k)
      for (std::size_t i = 0; i < nc; ++i)
        mf.set_param(cells[i], sel.params[k].id, x[k * nc + i] * sel.params[k].scale);
    return mf;
  };
  auto project = [&](std::vector<double>& x) {
    for (std::size_t k = 0; k < np; ++k) {
      const auto& b = sel.params[k];
      for (std::size_t i = 0; i < nc; ++i)
        x[k * nc + i] = std::clamp(x[k * nc + i], b.lower / b.scale, b.upper / b.scale);
    }
  };
  auto scaled_grad = [&](const GradientField& g) {
    std::vector<double> gx(np * nc);
    for (std::size_t k = 0; k < np; ++k)
      for (std::size_t i = 0; i < nc; ++i) gx[k * nc + i] = g.values[k][cells[i]] * sel.params[k].scale;
    return gx;
  };
  auto norm = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s += a * a;
    return std::sqrt(s);
  };

  InversionResult res;
  std::vector<double> x = to_x(initial);
  project(x);
  res.model = to_model(x, initial);
  Evaluation ev = evaluate(survey, res.model, &sel);
  std::vector<double> gx = scaled_grad(ev.gradient);
  const double g0 = norm(gx);
  res.history.push_back({0, ev.chi, g0, 0.0, 1});
  if (opt.on_iterate) opt.on_iterate(res.model, res.history.back());

  double gmax = 0.0;
  for (double v : gx) gmax = std::max(gmax, std::abs(v));
  double alpha = gmax > 0.0 ? opt.initial_step / gmax : 0.0;

  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    const double gn = norm(gx);
    if (gn == 0.0 || gn <= opt.grad_tol * g0 || ev.chi <= opt.chi_floor) {
      res.status = InversionStatus::converged;
      return res;
    }
    bool accepted = false;
    std::size_t evals = 0;
    std::vector<double> xt;
    Evaluation trial;
    for (std::size_t bt = 0; bt <= opt.max_backtracks; ++bt) {
      xt = x;
      for (std::size_t q = 0; q < xt.size(); ++q) xt[q] -= alpha * gx[q];
      project(xt);
      double decrease = 0.0;  // g^T (x_t - x)
      for (std::size_t q = 0; q < xt.size(); ++q) decrease += gx[q] * (xt[q] - x[q]);
      MaterialField mt;
      try {
        mt = to_model(xt, res.model);
        ++evals;
        trial = evaluate(survey, mt, nullptr);
      } catch (const NonPhysical&) {
        alpha *= 0.5;
        continue;
      } catch (const Instability&) {
        alpha *= 0.5;
        continue;
      }
      if (decrease < 0.0 && trial.chi <= ev.chi + opt.armijo_c1 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.status = InversionStatus::line_search_failure;
      return res;
    }
    const double used = alpha;
    std::vector<double> sk(x.size()), yk(x.size());
    for (std::size_t q = 0; q < x.size(); ++q) sk[q] = xt[q] - x[q];
    x = xt;
    res.model = to_model(x, res.model);
    ev = evaluate(survey, res.model, &sel);
    ++evals;
    std::vector<double> gnew = scaled_grad(ev.gradient);
    for (std::size_t q = 0; q < x.size(); ++q) yk[q] = gnew[q] - gx[q];
    gx = std::move(gnew);
    res.history.push_back({it, ev.chi, norm(gx), used, evals});
    if (opt.on_iterate) opt.on_iterate(res.model, res.history.back());
    // Barzilai-Borwein trial step for the next iterate; Armijo still decides
    double ss = 0.0, sy = 0.0;
    for (std::size_t q = 0; q < x.size(); ++q) {
      ss += sk[q] * sk[q];
      sy += sk[q] * yk[q];
    }
    alpha = sy > 0.0 ? ss / sy : 2.0 * used;
  }
  res.status = InversionStatus::max_iterations;
  return res;
}

}  // namespace pfwi
