#include <algorithm>
#include <cmath>
#include <sstream>

#include "common.hpp"
#include "doctest.h"
#include "pfwi/errors.hpp"
#include "pfwi/kernel_fit.hpp"
#include "pfwi/multiprecision.hpp"

using namespace pfwi;
using namespace pfwi::test;

TEST_CASE("frequency grid spacing and validation") {
  const FrequencyGrid g{5, Spacing::log, 1.0, 1e4};
  const auto n = g.nodes();
  REQUIRE(n.size() == 5);
  CHECK(n.front() == doctest::Approx(1.0));
  CHECK(n.back() == doctest::Approx(1e4));
  CHECK(n[2] == doctest::Approx(100.0));
  const FrequencyGrid lin{3, Spacing::linear, 2.0, 6.0};
  CHECK(lin.nodes()[1] == doctest::Approx(4.0));
  CHECK_THROWS_AS((FrequencyGrid{4, Spacing::log, 5.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((FrequencyGrid{0, Spacing::log, 1.0, 5.0}.validate()), ValidationError);
  const auto a = FrequencyGrid::around_source(30.0, 8);
  CHECK(a.omega_min == doctest::Approx(2.0 * M_PI * 3.0));
  CHECK(a.omega_max == doctest::Approx(2.0 * M_PI * 300.0));
}

TEST_CASE("hermitian Jacobi solver recovers a known spectrum") {
  mp::PrecisionScope scope(128);
  mp::Matrix a(2);
  a(0, 0) = mp::Complex(mp::Real(2));
  a(1, 1) = mp::Complex(mp::Real(2));
  a(0, 1) = mp::Complex(mp::Real(0), mp::Real(1));
  a(1, 0) = mp::Complex(mp::Real(0), mp::Real(-1));
  const auto e = mp::jacobi_eigen(a, 128);
  REQUIRE(e.values.size() == 2);
  CHECK(static_cast<double>(e.values[0]) == doctest::Approx(1.0).epsilon(1e-30));
  CHECK(static_cast<double>(e.values[1]) == doctest::Approx(3.0).epsilon(1e-30));
  // A V = V diag(values)
  mp::Matrix d(2);
  d(0, 0) = mp::Complex(e.values[0]);
  d(1, 1) = mp::Complex(e.values[1]);
  CHECK(static_cast<double>((a * e.vectors - e.vectors * d).frobenius()) < 1e-35);
}

TEST_CASE("Pick matrices are Hermitian with a positive definite S2") {
  const auto data = sample_kernel(jkd_material(), FrequencyGrid::around_source(30.0, 6), Axis::x);
  const auto pm = assemble_pick_matrices(data);
  mp::PrecisionScope scope(pm.precision_bits);
  CHECK(static_cast<double>((pm.S1 - pm.S1.adjoint()).frobenius()) < 1e-60);
  CHECK(static_cast<double>((pm.S2 - pm.S2.adjoint()).frobenius()) < 1e-60);
  const auto e = mp::jacobi_eigen(pm.S2, pm.precision_bits);
  CHECK(e.values.front() > 0);
}

TEST_CASE("generalized eigenpairs satisfy the pencil at working precision") {
  const auto data = sample_kernel(jkd_material(), FrequencyGrid::around_source(30.0, 6), Axis::z);
  const auto pm = assemble_pick_matrices(data);
  const auto eig = solve_generalized_eig(pm);
  mp::PrecisionScope scope(pm.precision_bits);
  const std::size_t n = pm.S1.size();
  mp::Matrix phi(n);
  for (std::size_t k = 0; k < n; ++k) phi(k, k) = mp::Complex(eig.phi[k]);
  const mp::Matrix lhs = pm.S1 * eig.V;
  const mp::Matrix rhs = pm.S2 * eig.V * phi;
  CHECK(static_cast<double>((lhs - rhs).frobenius() / lhs.frobenius()) < 1e-60);
  // V* S2 V = I, up to the conditioning of S2
  CHECK(static_cast<double>((eig.V.adjoint() * pm.S2 * eig.V - mp::Matrix::identity(n)).frobenius()) < 1e-40);
}

TEST_CASE("degenerate interpolation nodes are refused") {
  // s = 0 meets its own mirror image
  CHECK_THROWS_AS(assemble_pick_matrices(sample_stieltjes({0.0, 10.0, 100.0}, 1.0, {-5.0}, {1.0})), NodeCollision);
  // a repeated node makes S2 singular
  const auto pm = assemble_pick_matrices(sample_stieltjes({10.0, 10.0, 100.0}, 1.0, {-5.0}, {1.0}));
  CHECK_THROWS_AS(solve_generalized_eig(pm), SingularPencil);
}

TEST_CASE("two-term Stieltjes data is recovered exactly") {
  const std::vector<double> omega{3.0, 300.0};
  const auto data = sample_stieltjes(omega, 1.2, {-7.0, -450.0}, {2.0, 90.0});
  const auto eig = solve_generalized_eig(assemble_pick_matrices(data));
  auto set = extract_pole_residue(eig, data, 1.2, 0.0, Axis::x);
  REQUIRE(set.size() == 2);
  if (set.poles[0] < set.poles[1]) {
    std::swap(set.poles[0], set.poles[1]);
    std::swap(set.residues[0], set.residues[1]);
  }
  CHECK(set.poles[0] == doctest::Approx(-7.0).epsilon(1e-12));
  CHECK(set.poles[1] == doctest::Approx(-450.0).epsilon(1e-12));
  CHECK(set.residues[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(set.residues[1] == doctest::Approx(90.0).epsilon(1e-12));
}

TEST_CASE("JKD fit interpolates, keeps signs and approximates between nodes") {
  const PoroelasticParams p = jkd_material();
  const FrequencyGrid g = FrequencyGrid::around_source(100.0, 10);
  const KernelFit f = fit_kernel(p, g, Axis::x);
  CHECK(f.interpolation_defect < 1e-40);
  REQUIRE(f.set.size() > 0);
  for (std::size_t k = 0; k < f.set.size(); ++k) {
    CHECK(f.set.poles[k] < 0.0);
    CHECK(f.set.residues[k] > 0.0);
  }
  CHECK_NOTHROW(f.set.certify());
  // independent check between nodes against the direct tortuosity
  double worst = 0.0;
  for (double w : FrequencyGrid{57, Spacing::log, g.omega_min * 1.01, g.omega_max * 0.99}.nodes()) {
    const std::complex<double> s(0.0, -w);
    const auto exact = direct_tortuosity(p, s, 0);
    worst = std::max(worst, std::abs(evaluate_approx(f.set, s, true) - exact) / std::abs(exact));
  }
  CHECK(worst < 1e-5);
  CHECK(f.set.a == doctest::Approx(derive_coefficients(p).a[0]));
}

TEST_CASE("certification rejects unstable or duplicate poles") {
  PoleResidueSet s = PoleResidueSet::empty(Axis::x, 2.0, 10.0);
  CHECK_NOTHROW(s.certify());
  s.poles = {-1.0, 3.0};
  s.residues = {1.0, 1.0};
  CHECK_THROWS_AS(s.certify(), SignViolation);
  s.poles = {-1.0, -3.0};
  s.residues = {1.0, -1.0};
  CHECK_THROWS_AS(s.certify(), SignViolation);
  s.poles = {-2.0, -2.0};
  s.residues = {1.0, 1.0};
  CHECK_THROWS_AS(s.certify(), SignViolation);
}

TEST_CASE("evaluate_approx refuses poles and the origin") {
  PoleResidueSet s = PoleResidueSet::empty(Axis::z, 1.5, 4.0);
  s.poles = {-10.0};
  s.residues = {2.0};
  CHECK(evaluate_approx(s, {0.0, -1.0}, false) == std::complex<double>(1.5) + 2.0 / (std::complex<double>(0.0, -1.0) + 10.0));
  CHECK_THROWS_AS(evaluate_approx(s, -10.0, false), DomainError);
  CHECK_THROWS_AS(evaluate_approx(s, 0.0, true), DomainError);
}

TEST_CASE("kernel text artifact round trips bit for bit") {
  const PoroelasticParams p = desk_material();
  const KernelPair k = fitted_pair(p, 30.0, 6);
  std::stringstream ss;
  write_kernel_text(ss, {k.x, k.z});
  const std::string text = ss.str();
  CHECK(text.find("0x") != std::string::npos);
  std::stringstream in(text);
  const auto back = read_kernel_text(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].poles == k.x.poles);
  CHECK(back[0].residues == k.x.residues);
  CHECK(back[1].residues == k.z.residues);
  CHECK(back[1].axis == Axis::z);
  CHECK(back[0].a == k.x.a);
  CHECK(back[0].alpha_inf == k.x.alpha_inf);
  std::stringstream again;
  write_kernel_text(again, back);
  CHECK(again.str() == text);
}
