#include <cmath>
#include <random>
#include <vector>

#include "common.hpp"
#include "doctest.h"
#include "pfwi/errors.hpp"
#include "pfwi/grid.hpp"
#include "pfwi/kernels.hpp"
#include "pfwi/operators.hpp"
#include "pfwi/wavefield.hpp"

using namespace pfwi;
using namespace pfwi::test;

namespace {

std::vector<double> random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> u(n);
  for (double& x : u) x = nd(rng);
  return u;
}

/// Heterogeneous model so the unique-material tables hold several entries.
MaterialField patchy(std::size_t nx, std::size_t nz) {
  MaterialField mf(nx, nz, desk_material());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.9, 1.1);
  for (std::size_t c = 0; c < mf.size(); c += 7) {
    PoroelasticParams p = mf.cell(c);
    p.phi *= u(rng);
    p.kappa[0] *= u(rng);
    p.stiffness.c55 *= u(rng);
    mf.set_cell(c, p);
  }
  return mf;
}

struct Setup {
  Grid2D g;
  MaterialField mf;
  KernelPair k;
  SystemOperators ops;
};

Setup make_setup(bool periodic, std::size_t nx = 24, std::size_t nz = 20) {
  Setup s;
  s.g = {nx, nz, 4.0, 5.0, 0.0, 0.0};
  s.mf = patchy(nx, nz);
  s.k = fitted_pair(desk_material(), 30.0, 3);
  Discretization d;
  d.dt = cfl_dt(s.mf, s.g, 0.5);
  if (!periodic) {
    BoundaryConfig b;
    b.width = 4;
    d.sponge_rate = sponge_profile(s.g, b, max_wave_speed(s.mf));
  }
  s.ops = assemble_system(s.mf, s.g, s.k, d, periodic);
  return s;
}

double dot(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("bilinear stencil reproduces linear functions") {
  const Grid2D g{20, 16, 2.0, 3.0, 1.0, -4.0};
  for (NodeSet s : {NodeSet::C, NodeSet::X, NodeSet::Z, NodeSet::XZ}) {
    const Stencil4 st = bilinear_stencil(g, s, 17.3, 12.9, false, 2);
    double wsum = 0.0, f = 0.0;
    for (int q = 0; q < 4; ++q) {
      wsum += st.w[q];
      const std::size_t i = st.idx[q] % g.nx, j = st.idx[q] / g.nx;
      f += st.w[q] * (2.0 * g.x_at(s, i) - 3.0 * g.z_at(s, j));
    }
    CHECK(wsum == doctest::Approx(1.0));
    CHECK(f == doctest::Approx(2.0 * 17.3 - 3.0 * 12.9));
  }
}

TEST_CASE("bilinear stencil honours margins and wraps when periodic") {
  const Grid2D g{16, 16, 1.0, 1.0, 0.0, 0.0};
  CHECK_THROWS_AS(bilinear_stencil(g, NodeSet::C, 1.5, 8.0, false, 3), OutOfDomain);
  CHECK_THROWS_AS(bilinear_stencil(g, NodeSet::C, 8.0, 14.5, false, 2), OutOfDomain);
  CHECK_NOTHROW(bilinear_stencil(g, NodeSet::C, 3.0, 8.0, false, 3));
  const Stencil4 st = bilinear_stencil(g, NodeSet::C, 15.5, 3.0, true);
  CHECK((st.idx[1] % 16) == 0);
  CHECK(st.w[0] == doctest::Approx(0.5));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((Grid2D{4, 16, 1.0, 1.0, 0.0, 0.0}.validate()), ValidationError);
  CHECK_THROWS_AS((Grid2D{16, 16, 0.0, 1.0, 0.0, 0.0}.validate()), ValidationError);
  CHECK_NOTHROW((Grid2D{8, 8, 1.0, 1.0, 0.0, 0.0}.validate()));
}

TEST_CASE("staggered difference has the fourth-order symbol") {
  Setup s = make_setup(true, 32, 16);
  const auto kv = s.ops.view();
  const std::size_t n = s.g.size();
  const double L = s.g.nx * s.g.dx, k = 2.0 * M_PI * 3.0 / L, h = s.g.dx;
  std::vector<double> u(s.ops.n_fields() * n, 0.0), z(8 * n, 0.0);
  for (std::size_t j = 0; j < s.g.nz; ++j)
    for (std::size_t i = 0; i < s.g.nx; ++i) u[kV1 * n + s.g.index(i, j)] = std::sin(k * s.g.x_at(NodeSet::X, i));
  kernels::serial::transport(kv, u.data(), z.data());
  const double symbol = (2.0 / h) * (9.0 / 8.0 * std::sin(k * h / 2.0) - std::sin(1.5 * k * h) / 24.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < s.g.nz; ++j)
    for (std::size_t i = 0; i < s.g.nx; ++i)
      worst = std::max(worst, std::abs(z[kTau11 * n + s.g.index(i, j)] - symbol * std::cos(k * s.g.x_at(NodeSet::C, i))));
  CHECK(worst < 1e-12 * k);
  // and the symbol is k to fourth order
  CHECK(std::abs(symbol - k) / k < std::pow(k * h, 4));
}

TEST_CASE("transport operator is skew on a periodic grid") {
  Setup s = make_setup(true);
  const auto kv = s.ops.view();
  const std::size_t n = s.g.size(), m = 8 * n;
  auto u = random_state(s.ops.n_fields() * n, 1), v = random_state(s.ops.n_fields() * n, 2);
  std::vector<double> bu(m), bv(m);
  kernels::serial::transport(kv, u.data(), bu.data());
  kernels::serial::transport(kv, v.data(), bv.data());
  const double a = dot(u, bv, m), b = dot(bu, v, m);
  CHECK(std::abs(a + b) < 1e-12 * std::abs(a));
}

TEST_CASE("parallel kernels match the serial reference") {
  for (bool periodic : {true, false}) {
    Setup s = make_setup(periodic);
    const auto kv = s.ops.view();
    const std::size_t n = s.g.size(), nf = s.ops.n_fields();
    const auto u = random_state(nf * n, 3);
    std::vector<double> z1(8 * n), z2(8 * n);
    kernels::serial::transport(kv, u.data(), z1.data());
    kernels::omp::transport(kv, u.data(), z2.data());
    CHECK(z1 == z2);
    kernels::serial::inv_mass(kv, z1.data());
    kernels::omp::inv_mass(kv, z2.data());
    CHECK(z1 == z2);
    for (bool tr : {false, true}) {
      auto a = u, b = u;
      kernels::serial::local(kv, a.data(), tr);
      kernels::omp::local(kv, b.data(), tr);
      double worst = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
      CHECK(worst < 1e-13);
    }
    auto a = u, b = u;
    kernels::serial::zero_ring(kv, a.data(), nf);
    kernels::omp::zero_ring(kv, b.data(), nf);
    CHECK(a == b);
    CHECK(a[0] == 0.0);
    CHECK(a[s.g.index(5, 0)] == 0.0);
    CHECK(a[s.g.index(5, 5)] == u[s.g.index(5, 5)]);
  }
}

TEST_CASE("local step transpose is the adjoint of the local step") {
  Setup s = make_setup(false);
  const auto kv = s.ops.view();
  const std::size_t n = s.g.size() * s.ops.n_fields();
  auto u = random_state(n, 4), v = random_state(n, 5);
  auto lu = u, lv = v;
  kernels::omp::local(kv, lu.data(), false);
  kernels::omp::local(kv, lv.data(), true);
  const double a = dot(lu, v, n), b = dot(u, lv, n);
  CHECK(std::abs(a - b) < 1e-12 * std::abs(a));
}

TEST_CASE("local exponential agrees with a fine RK4 integration") {
  const NodeMatrices nm = node_matrices(desk_material(), fitted_pair(desk_material(), 30.0, 3));
  const Eigen::MatrixXd& G = nm.gen[0];
  const double h = 2e-4;
  const Eigen::MatrixXd E = local_exponential(G, h);
  const int steps = 20000;
  const double dt = h / steps;
  Eigen::MatrixXd Y = Eigen::MatrixXd::Identity(G.rows(), G.cols());
  for (int i = 0; i < steps; ++i) {
    const Eigen::MatrixXd k1 = G * Y, k2 = G * (Y + 0.5 * dt * k1), k3 = G * (Y + 0.5 * dt * k2),
                          k4 = G * (Y + dt * k3);
    Y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  CHECK((E - Y).norm() < 1e-9 * Y.norm());
}

TEST_CASE("plane-wave speeds solve the high-frequency Biot dispersion relation") {
  PoroelasticParams p = desk_material();
  const auto dc = derive_coefficients(p);
  const double H = dc.C_u(0, 0), C = dc.M_biot * dc.beta[0], M = dc.M_biot, m = dc.m[0];
  const double rho = dc.rho_bulk, rf = p.rho_f;
  // det [[H - rho v], [C - rf v]; [C - rf v], [M - m v]] = 0 in v = c^2
  const double qa = rho * m - rf * rf, qb = -(H * m + M * rho - 2.0 * C * rf), qc = H * M - C * C;
  const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const double fast = std::sqrt((-qb + disc) / (2.0 * qa)), slow = std::sqrt((-qb - disc) / (2.0 * qa));
  const double shear = std::sqrt(p.stiffness.c55 / (rho - rf * rf / m));
  const auto sp = plane_wave_speeds(p, 1.0, 0.0);
  CHECK(sp[0] == doctest::Approx(fast).epsilon(1e-10));
  CHECK(sp[1] == doctest::Approx(shear).epsilon(1e-10));
  CHECK(sp[2] == doctest::Approx(slow).epsilon(1e-10));
  // isotropic material: direction does not matter
  const auto diag = plane_wave_speeds(p, std::sqrt(0.5), std::sqrt(0.5));
  CHECK(diag[0] == doctest::Approx(fast).epsilon(1e-10));
}

TEST_CASE("CFL step and sponge profile") {
  const Grid2D g{40, 30, 5.0, 4.0, 0.0, 0.0};
  const MaterialField mf(40, 30, desk_material());
  const double c = max_wave_speed(mf);
  CHECK(cfl_dt(mf, g, 0.5) == doctest::Approx(0.5 * 4.0 / (c * 7.0 / 6.0)));
  BoundaryConfig b;
  b.width = 8;
  b.strength = 20.0;
  const auto rate = sponge_profile(g, b, c);
  const auto& rc = rate[kernels::set_slot(NodeSet::C)];
  REQUIRE(rc.size() == g.size());
  CHECK(rc[g.index(20, 15)] == 0.0);
  CHECK(rc[g.index(0, 15)] == doctest::Approx(20.0 * c / (8.0 * 5.0)));
  CHECK(rc[g.index(0, 15)] > rc[g.index(3, 15)]);
  CHECK(rc[g.index(3, 15)] > 0.0);
  b.kind = BoundaryConfig::Kind::periodic;
  CHECK(sponge_profile(g, b, c)[0].empty());
}

TEST_CASE("assembly rejects a mismatched grid") {
  const MaterialField mf(10, 10, desk_material());
  const Grid2D g{12, 10, 1.0, 1.0, 0.0, 0.0};
  Discretization d;
  d.dt = 1e-4;
  CHECK_THROWS_AS(assemble_system(mf, g, KernelPair::empty(desk_material()), d, true), GeometryMismatch);
}
