#include "pfwi/material.hpp"

#include <cmath>
#include <sstream>

#include "pfwi/errors.hpp"

namespace pfwi {

namespace {

constexpr std::array<std::string_view, kParamCount> kNames{
    "phi",         "rho_s",       "rho_f",   "eta",     "K_s", "K_f",
    "kappa_1",     "kappa_3",     "alpha_inf_1", "alpha_inf_3", "pride_1", "pride_3",
    "c11",         "c12",         "c13",     "c33",     "c55"};

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string join(const std::vector<std::string>& items) {
  std::ostringstream out;
  for (std::size_t k = 0; k < items.size(); ++k) out << (k ? "; " : "") << items[k];
  return out.str();
}

}  // namespace

Eigen::Matrix3d ElasticStiffness::matrix() const {
  Eigen::Matrix3d c;
  c << c11, c13, 0.0, c13, c33, 0.0, 0.0, 0.0, c55;
  return c;
}

std::string_view param_name(ParamId id) { return kNames[static_cast<std::size_t>(id)]; }

std::optional<ParamId> param_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kParamCount; ++k)
    if (kNames[k] == name) return static_cast<ParamId>(k);
  return std::nullopt;
}

std::array<ParamId, kParamCount> all_params() {
  std::array<ParamId, kParamCount> ids{};
  for (std::size_t k = 0; k < kParamCount; ++k) ids[k] = static_cast<ParamId>(k);
  return ids;
}

double get_param(const PoroelasticParams& p, ParamId id) {
  switch (id) {
    case ParamId::phi: return p.phi;
    case ParamId::rho_s: return p.rho_s;
    case ParamId::rho_f: return p.rho_f;
    case ParamId::eta: return p.eta;
    case ParamId::K_s: return p.K_s;
    case ParamId::K_f: return p.K_f;
    case ParamId::kappa_1: return p.kappa[0];
    case ParamId::kappa_3: return p.kappa[1];
    case ParamId::alpha_inf_1: return p.alpha_inf[0];
    case ParamId::alpha_inf_3: return p.alpha_inf[1];
    case ParamId::pride_1: return p.pride[0];
    case ParamId::pride_3: return p.pride[1];
    case ParamId::c11: return p.stiffness.c11;
    case ParamId::c12: return p.stiffness.c12;
    case ParamId::c13: return p.stiffness.c13;
    case ParamId::c33: return p.stiffness.c33;
    case ParamId::c55: return p.stiffness.c55;
  }
  return 0.0;
}

void set_param(PoroelasticParams& p, ParamId id, double value) {
  switch (id) {
    case ParamId::phi: p.phi = value; break;
    case ParamId::rho_s: p.rho_s = value; break;
    case ParamId::rho_f: p.rho_f = value; break;
    case ParamId::eta: p.eta = value; break;
    case ParamId::K_s: p.K_s = value; break;
    case ParamId::K_f: p.K_f = value; break;
    case ParamId::kappa_1: p.kappa[0] = value; break;
    case ParamId::kappa_3: p.kappa[1] = value; break;
    case ParamId::alpha_inf_1: p.alpha_inf[0] = value; break;
    case ParamId::alpha_inf_3: p.alpha_inf[1] = value; break;
    case ParamId::pride_1: p.pride[0] = value; break;
    case ParamId::pride_3: p.pride[1] = value; break;
    case ParamId::c11: p.stiffness.c11 = value; break;
    case ParamId::c12: p.stiffness.c12 = value; break;
    case ParamId::c13: p.stiffness.c13 = value; break;
    case ParamId::c33: p.stiffness.c33 = value; break;
    case ParamId::c55: p.stiffness.c55 = value; break;
  }
}

bool is_invertible(ParamId id) {
  switch (id) {
    case ParamId::rho_f:
    case ParamId::pride_1:
    case ParamId::pride_3:
    case ParamId::c12:
      return false;
    default:
      return true;
  }
}

std::vector<std::string> validate(const PoroelasticParams& p) {
  std::vector<std::string> bad;
  auto need_positive = [&](std::string_view name, double v) {
    if (!finite_positive(v)) bad.push_back(std::string(name) + " must be finite and > 0");
  };
  if (!(std::isfinite(p.phi) && p.phi > 0.0 && p.phi < 1.0)) bad.emplace_back("phi must lie in (0,1)");
  need_positive("rho_s", p.rho_s);
  need_positive("rho_f", p.rho_f);
  if (!(std::isfinite(p.eta) && p.eta >= 0.0)) bad.emplace_back("eta must be finite and >= 0");
  need_positive("K_s", p.K_s);
  need_positive("K_f", p.K_f);
  for (std::size_t j = 0; j < 2; ++j) {
    const char* sfx = j == 0 ? "_1" : "_3";
    need_positive(std::string("kappa") + sfx, p.kappa[j]);
    need_positive(std::string("pride") + sfx, p.pride[j]);
    if (!(std::isfinite(p.alpha_inf[j]) && p.alpha_inf[j] >= 1.0))
      bad.push_back(std::string("alpha_inf") + sfx + " must be >= 1");
  }
  const auto& c = p.stiffness;
  need_positive("c11", c.c11);
  need_positive("c33", c.c33);
  need_positive("c55", c.c55);
  if (!std::isfinite(c.c12)) bad.emplace_back("c12 must be finite");
  if (!std::isfinite(c.c13)) bad.emplace_back("c13 must be finite");
  if (!(c.c11 * c.c33 - c.c13 * c.c13 > 0.0)) bad.emplace_back("stiffness C not positive definite");
  return bad;
}

Eigen::Matrix2d DerivedCoefficients::inertia(Axis axis, double rho_f) const {
  Eigen::Matrix2d mv;
  mv << rho_bulk, rho_f, rho_f, m[axis_index(axis)];
  return mv;
}

DerivedCoefficients derive_coefficients(const PoroelasticParams& p) {
  auto bad = validate(p);
  if (!bad.empty()) throw NonPhysical(join(bad));
  const double denom = p.K_s * (1.0 + p.phi * (p.K_s / p.K_f - 1.0)) -
                       (2.0 * p.stiffness.c11 + p.stiffness.c33 + 2.0 * p.stiffness.c12 +
                        4.0 * p.stiffness.c13) / 9.0;
  if (!(denom > 0.0)) throw NonPhysical("Biot modulus denominator is not positive");

  DerivedCoefficients dc = derive_coefficients_unchecked(p);
  for (std::size_t j = 0; j < 2; ++j)
    if (!(dc.rho_bulk * dc.m[j] - p.rho_f * p.rho_f > 0.0))
      throw NonPhysical("inertia block [[rho, rho_f],[rho_f, m]] not positive definite");
  Eigen::LLT<Eigen::Matrix4d> llt(dc.E_mat);
  if (llt.info() != Eigen::Success) throw NonPhysical("E matrix is not positive definite");
  return dc;
}

DerivedCoefficients derive_coefficients_unchecked(const PoroelasticParams& p) {
  const auto& st = p.stiffness;
  DerivedCoefficients dc;
  dc.beta[0] = 1.0 - (st.c11 + st.c12 + st.c13) / (3.0 * p.K_s);
  dc.beta[1] = 1.0 - (2.0 * st.c13 + st.c33) / (3.0 * p.K_s);

  const double denom = p.K_s * (1.0 + p.phi * (p.K_s / p.K_f - 1.0)) -
                       (2.0 * st.c11 + st.c33 + 2.0 * st.c12 + 4.0 * st.c13) / 9.0;
  dc.M_biot = p.K_s * p.K_s / denom;

  const Eigen::Vector3d beta(dc.beta[0], dc.beta[1], 0.0);
  dc.C = st.matrix();
  dc.C_u = dc.C + dc.M_biot * beta * beta.transpose();
  dc.E_mat.topLeftCorner<3, 3>() = dc.C_u;
  dc.E_mat.topRightCorner<3, 1>() = dc.M_biot * beta;
  dc.E_mat.bottomLeftCorner<1, 3>() = dc.M_biot * beta.transpose();
  dc.E_mat(3, 3) = dc.M_biot;

  dc.rho_bulk = (1.0 - p.phi) * p.rho_s + p.phi * p.rho_f;
  for (std::size_t j = 0; j < 2; ++j) {
    const double ainf = p.alpha_inf[j];
    const double kap = p.kappa[j];
    dc.m[j] = ainf * p.rho_f / p.phi;
    dc.a[j] = p.eta * p.phi / (p.rho_f * kap);
    dc.Lambda[j] = std::sqrt(4.0 * ainf * kap / (p.phi * p.pride[j]));
    dc.lambda[j] = p.eta * p.phi * p.phi * dc.Lambda[j] * dc.Lambda[j] /
                   (4.0 * ainf * ainf * kap * kap * p.rho_f);
    dc.gamma[j] = dc.lambda[j] > 0.0 ? p.eta / (kap * std::sqrt(dc.lambda[j])) : 0.0;
    dc.n[j] = p.eta / kap;
  }
  return dc;
}

void set_drag_sums(DerivedCoefficients& dc, const PoroelasticParams& p,
                   const std::array<double, 2>& residue_sums) {
  for (std::size_t j = 0; j < 2; ++j)
    dc.n[j] = p.eta / p.kappa[j] + (p.rho_f / p.phi) * residue_sums[j];
}

std::complex<double> jkd_tortuosity(const PoroelasticParams& p, std::complex<double> s, Axis axis) {
  if (s == 0.0) throw DomainError("tortuosity evaluated at s = 0");
  const std::size_t j = axis_index(axis);
  const double ainf = p.alpha_inf[j];
  if (p.eta == 0.0) return ainf;
  const double kap = p.kappa[j];
  const double Lam2 = 4.0 * ainf * kap / (p.phi * p.pride[j]);
  const double a = p.eta * p.phi / (p.rho_f * kap);
  const double coeff = 4.0 * ainf * ainf * kap * kap * p.rho_f / (p.eta * Lam2 * p.phi * p.phi);
  return ainf + (a / s) * std::sqrt(1.0 + s * coeff);
}

std::complex<double> d_function(const PoroelasticParams& p, std::complex<double> s, Axis axis) {
  if (s == 0.0) throw DomainError("D evaluated at s = 0");
  const std::size_t j = axis_index(axis);
  const double ainf = p.alpha_inf[j];
  if (p.eta == 0.0) return ainf;
  // (a/s)(sqrt(1+s/lambda) - 1) == (a/lambda) / (1 + sqrt(1+s/lambda)), and
  // a/lambda reduces to alpha_inf * P.
  const double kap = p.kappa[j];
  const double Lam2 = 4.0 * ainf * kap / (p.phi * p.pride[j]);
  const double lambda = p.eta * p.phi * p.phi * Lam2 / (4.0 * ainf * ainf * kap * kap * p.rho_f);
  const double a = p.eta * p.phi / (p.rho_f * kap);
  return ainf + (a / lambda) / (1.0 + std::sqrt(1.0 + s / lambda));
}

MaterialField::MaterialField(std::size_t nx, std::size_t nz, const PoroelasticParams& uniform)
    : nx_(nx), nz_(nz), cells_(nx * nz, uniform), derived_(nx * nz, derive_coefficients(uniform)) {}

void MaterialField::set_cell(std::size_t flat, const PoroelasticParams& p) {
  derived_.at(flat) = derive_coefficients(p);
  cells_[flat] = p;
}

void MaterialField::set_param(std::size_t flat, ParamId id, double value) {
  PoroelasticParams p = cells_.at(flat);
  pfwi::set_param(p, id, value);
  set_cell(flat, p);
}

}  // namespace pfwi
