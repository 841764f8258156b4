#include "pfwi/operators.hpp"

#include <bit>
#include <cmath>
#include <unordered_map>

#include <unsupported/Eigen/MatrixFunctions>

#include "pfwi/errors.hpp"

namespace pfwi {

namespace {

struct ParamsHash {
  std::size_t operator()(const PoroelasticParams& p) const {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (ParamId id : all_params()) {
      h ^= std::bit_cast<std::uint64_t>(get_param(p, id));
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

}  // namespace

KernelPair KernelPair::empty(const PoroelasticParams& p) {
  return {PoleResidueSet::empty(Axis::x, p.alpha_inf[0], 0.0),
          PoleResidueSet::empty(Axis::z, p.alpha_inf[1], 0.0)};
}

NodeMatrices node_matrices(const PoroelasticParams& p, const KernelPair& k) {
  const DerivedCoefficients dc = derive_coefficients_unchecked(p);
  NodeMatrices nm;
  nm.mem = p.rho_f / p.phi;
  for (std::size_t j = 0; j < 2; ++j) {
    nm.mv[j] << dc.rho_bulk, p.rho_f, p.rho_f, dc.m[j];
    nm.mv_inv[j] = nm.mv[j].inverse();
    nm.darcy[j] = p.eta / p.kappa[j];

    const PoleResidueSet& prs = k[j];
    const std::size_t nk = prs.size();
    const double n_j = nm.darcy[j] + nm.mem * prs.residue_sum();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 + nk, 2 + nk);
    g.block<2, 1>(0, 1) = -n_j * nm.mv_inv[j].col(1);
    for (std::size_t q = 0; q < nk; ++q) {
      g.block<2, 1>(0, 2 + q) = nm.mem * prs.residues[q] * nm.mv_inv[j].col(1);
      g(2 + q, 1) = -prs.poles[q];
      g(2 + q, 2 + q) = prs.poles[q];
    }
    nm.gen[j] = std::move(g);
  }
  const int sel[3] = {0, 1, 3};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) nm.e3(r, c) = dc.E_mat(sel[r], sel[c]);
  nm.e3_inv = nm.e3.inverse();
  Eigen::Matrix2d c2;
  c2 << p.stiffness.c11, p.stiffness.c13, p.stiffness.c13, p.stiffness.c33;
  nm.c2_inv = c2.inverse();
  nm.c55 = p.stiffness.c55;
  return nm;
}

CellWeights node_cells(const Grid2D& g, NodeSet s, std::size_t i, std::size_t j, bool periodic) {
  auto next = [&](std::size_t k, std::size_t n) {
    if (k + 1 < n) return k + 1;
    return periodic ? std::size_t{0} : k;
  };
  const std::size_t i1 = next(i, g.nx);
  const std::size_t j1 = next(j, g.nz);
  switch (s) {
    case NodeSet::C: return {{g.index(i, j), 1.0}};
    case NodeSet::X: return {{g.index(i, j), 0.5}, {g.index(i1, j), 0.5}};
    case NodeSet::Z: return {{g.index(i, j), 0.5}, {g.index(i, j1), 0.5}};
    case NodeSet::XZ:
      return {{g.index(i, j), 0.25}, {g.index(i1, j), 0.25}, {g.index(i, j1), 0.25}, {g.index(i1, j1), 0.25}};
  }
  return {};
}

PoroelasticParams averaged_params(const std::vector<PoroelasticParams>& cells, const CellWeights& w) {
  if (w.size() == 1) return cells[w[0].first];
  // all neighbours identical: keep the exact value
  bool same = true;
  for (const auto& [c, _] : w) same = same && cells[c] == cells[w[0].first];
  if (same) return cells[w[0].first];
  PoroelasticParams out = cells[w[0].first];
  for (ParamId id : all_params()) {
    double acc = 0.0;
    for (const auto& [c, wt] : w) acc += wt * get_param(cells[c], id);
    set_param(out, id, acc);
  }
  return out;
}

Eigen::MatrixXd local_exponential(const Eigen::MatrixXd& gen, double h) {
  return (gen * h).exp();
}

SystemOperators assemble_system(const MaterialField& mf, const Grid2D& grid, const KernelPair& k,
                                const Discretization& disc, bool periodic) {
  if (mf.nx() != grid.nx || mf.nz() != grid.nz)
    throw GeometryMismatch("material field is " + std::to_string(mf.nx()) + "x" +
                           std::to_string(mf.nz()) + " but the grid is " + std::to_string(grid.nx) +
                           "x" + std::to_string(grid.nz));
  k.x.certify();
  k.z.certify();
  SystemOperators ops;
  ops.grid = grid;
  ops.periodic = periodic;
  ops.dt = disc.dt;
  ops.kernels = k;
  ops.n1 = k.x.size();
  ops.n3 = k.z.size();

  const NodeSet sets[4] = {NodeSet::C, NodeSet::X, NodeSet::Z, NodeSet::XZ};
  for (NodeSet s : sets) {
    const std::size_t slot = kernels::set_slot(s);
    NodeTable& tab = ops.tables[slot];
    tab.index.resize(grid.size());
    std::unordered_map<PoroelasticParams, std::uint32_t, ParamsHash> seen;
    for (std::size_t j = 0; j < grid.nz; ++j)
      for (std::size_t i = 0; i < grid.nx; ++i) {
        PoroelasticParams pb = averaged_params(mf.cells(), node_cells(grid, s, i, j, periodic));
        auto it = seen.find(pb);
        if (it == seen.end()) {
          derive_coefficients(pb);  // positivity checks on the averaged material
          it = seen.emplace(pb, static_cast<std::uint32_t>(tab.params.size())).first;
          tab.params.push_back(pb);
          ops.unique[slot].push_back(node_matrices(pb, k));
        }
        tab.index[grid.index(i, j)] = it->second;
      }
  }

  const double h = 0.5 * disc.dt;
  for (const auto& nm : ops.unique[kernels::set_slot(NodeSet::X)]) {
    for (int q = 0; q < 4; ++q) ops.mvinv_x.push_back(nm.mv_inv[0](q / 2, q % 2));
    const Eigen::MatrixXd ex = local_exponential(nm.gen[0], h);
    for (Eigen::Index r = 0; r < ex.rows(); ++r)
      for (Eigen::Index c = 0; c < ex.cols(); ++c) ops.expo_x.push_back(ex(r, c));
  }
  for (const auto& nm : ops.unique[kernels::set_slot(NodeSet::Z)]) {
    for (int q = 0; q < 4; ++q) ops.mvinv_z.push_back(nm.mv_inv[1](q / 2, q % 2));
    const Eigen::MatrixXd ez = local_exponential(nm.gen[1], h);
    for (Eigen::Index r = 0; r < ez.rows(); ++r)
      for (Eigen::Index c = 0; c < ez.cols(); ++c) ops.expo_z.push_back(ez(r, c));
  }
  for (const auto& nm : ops.unique[kernels::set_slot(NodeSet::C)])
    for (int q = 0; q < 9; ++q) ops.e3.push_back(nm.e3(q / 3, q % 3));
  for (const auto& nm : ops.unique[kernels::set_slot(NodeSet::XZ)]) ops.c55.push_back(nm.c55);

  for (std::size_t s = 0; s < 4; ++s) {
    ops.sponge_rate[s] = disc.sponge_rate[s];
    if (ops.sponge_rate[s].empty()) continue;
    if (ops.sponge_rate[s].size() != grid.size()) throw GeometryMismatch("sponge profile size");
    ops.sponge_factor[s].resize(grid.size());
    for (std::size_t p = 0; p < grid.size(); ++p)
      ops.sponge_factor[s][p] = std::exp(-ops.sponge_rate[s][p] * h);
  }
  return ops;
}

kernels::KernelView SystemOperators::view() const {
  kernels::KernelView kv;
  kv.grid = grid;
  kv.periodic = periodic;
  kv.n1 = n1;
  kv.n3 = n3;
  for (std::size_t s = 0; s < 4; ++s) {
    kv.idx[s] = tables[s].index.data();
    kv.sponge[s] = sponge_factor[s].empty() ? nullptr : sponge_factor[s].data();
  }
  kv.mvinv_x = mvinv_x.data();
  kv.mvinv_z = mvinv_z.data();
  kv.e3 = e3.data();
  kv.c55 = c55.data();
  kv.expo_x = expo_x.data();
  kv.expo_z = expo_z.data();
  return kv;
}

std::array<double, 3> plane_wave_speeds(const PoroelasticParams& p, double nx, double nz) {
  const DerivedCoefficients dc = derive_coefficients(p);
  Eigen::Matrix<double, 8, 8> N1 = Eigen::Matrix<double, 8, 8>::Zero();
  N1(0, 0) = N1(1, 1) = dc.rho_bulk;
  N1(0, 2) = N1(2, 0) = N1(1, 3) = N1(3, 1) = p.rho_f;
  N1(2, 2) = dc.m[0];
  N1(3, 3) = dc.m[1];
  N1.block<4, 4>(4, 4) = dc.E_mat.inverse();
  N1.block<4, 4>(4, 4) = 0.5 * (N1.block<4, 4>(4, 4) + N1.block<4, 4>(4, 4).transpose()).eval();

  Eigen::Matrix<double, 8, 8> Bn = Eigen::Matrix<double, 8, 8>::Zero();
  auto link = [&](int a, int b, double w) { Bn(a, b) += w; Bn(b, a) += w; };
  link(0, 4, nx);  // v1 - tau11
  link(2, 7, nx);  // q1 - (-p)
  link(1, 6, nx);  // v3 - tau13
  link(1, 5, nz);  // v3 - tau33
  link(3, 7, nz);  // q3 - (-p)
  link(0, 6, nz);  // v1 - tau13

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> es(Bn, N1);
  const auto& ev = es.eigenvalues();  // ascending
  return {ev(7), ev(6), ev(5)};
}

double max_wave_speed(const MaterialField& mf) {
  std::unordered_map<PoroelasticParams, double, ParamsHash> seen;
  double cmax = 0.0;
  for (const auto& p : mf.cells()) {
    if (seen.count(p)) continue;
    double c = 0.0;
    for (int a = 0; a < 36; ++a) {
      const double th = M_PI * a / 36.0;
      c = std::max(c, plane_wave_speeds(p, std::cos(th), std::sin(th))[0]);
    }
    seen.emplace(p, c);
    cmax = std::max(cmax, c);
  }
  return cmax;
}

double cfl_dt(const MaterialField& mf, const Grid2D& grid, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw ValidationError("CFL safety must lie in (0, 1]");
  return safety * std::min(grid.dx, grid.dz) / (max_wave_speed(mf) * 7.0 / 6.0);
}

std::array<std::vector<double>, 4> sponge_profile(const Grid2D& grid, const BoundaryConfig& b,
                                                  double c_ref) {
  std::array<std::vector<double>, 4> out;
  if (b.periodic() || b.width == 0 || b.strength <= 0.0) return out;
  const double w = static_cast<double>(b.width);
  auto taper = [&](double xi, std::size_t n, double h) {
    const double hi = static_cast<double>(n - 1) - w;
    double d = 0.0;
    if (xi < w) d = w - xi;
    else if (xi > hi) d = xi - hi;
    d = std::min(d, w);
    const double smax = b.strength * c_ref / (w * h);
    return smax * 0.5 * (1.0 - std::cos(M_PI * d / w));
  };
  const NodeSet sets[4] = {NodeSet::C, NodeSet::X, NodeSet::Z, NodeSet::XZ};
  for (NodeSet s : sets) {
    const NodeOffset off = node_offset(s);
    auto& v = out[kernels::set_slot(s)];
    v.resize(grid.size());
    for (std::size_t j = 0; j < grid.nz; ++j)
      for (std::size_t i = 0; i < grid.nx; ++i)
        v[grid.index(i, j)] = taper(static_cast<double>(i) + off.x, grid.nx, grid.dx) +
                              taper(static_cast<double>(j) + off.z, grid.nz, grid.dz);
  }
  return out;
}

}  // namespace pfwi
