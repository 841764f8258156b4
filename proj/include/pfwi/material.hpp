#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pfwi {

/// Principal axes of the transversely isotropic frame. `x` carries index 1
/// and `z` index 3; arrays are indexed by `axis_index`.
enum class Axis { x = 1, z = 3 };

constexpr std::size_t axis_index(Axis a) { return a == Axis::x ? 0 : 1; }
constexpr Axis axis_from_index(std::size_t i) { return i == 0 ? Axis::x : Axis::z; }
constexpr std::array<Axis, 2> kAxes{Axis::x, Axis::z};

/// Drained stiffness moduli [Pa]. c12 only enters the coefficient formulas.
struct ElasticStiffness {
  double c11 = 0.0;
  double c12 = 0.0;
  double c13 = 0.0;
  double c33 = 0.0;
  double c55 = 0.0;

  /// Plane-strain matrix C acting on (eps11, eps33, 2 eps13).
  Eigen::Matrix3d matrix() const;

  bool operator==(const ElasticStiffness&) const = default;
};

/// Raw material inputs of one homogeneous cell, SI units.
struct PoroelasticParams {
  double phi = 0.0;
  double rho_s = 0.0;
  double rho_f = 0.0;
  double eta = 0.0;
  double K_s = 0.0;
  double K_f = 0.0;
  std::array<double, 2> kappa{0.0, 0.0};
  std::array<double, 2> alpha_inf{1.0, 1.0};
  std::array<double, 2> pride{0.5, 0.5};
  ElasticStiffness stiffness;

  bool operator==(const PoroelasticParams&) const = default;
};

/// Every scalar of PoroelasticParams addressable by id; used for per-cell
/// fields, config keys and inversion parameter selection.
enum class ParamId {
  phi,
  rho_s,
  rho_f,
  eta,
  K_s,
  K_f,
  kappa_1,
  kappa_3,
  alpha_inf_1,
  alpha_inf_3,
  pride_1,
  pride_3,
  c11,
  c12,
  c13,
  c33,
  c55,
};

inline constexpr std::size_t kParamCount = 17;

std::string_view param_name(ParamId id);
std::optional<ParamId> param_from_name(std::string_view name);
double get_param(const PoroelasticParams& p, ParamId id);
void set_param(PoroelasticParams& p, ParamId id, double value);
std::array<ParamId, kParamCount> all_params();

/// True for the parameters the inversion is allowed to update.
bool is_invertible(ParamId id);

/// Human-readable list of every violated invariant; empty when valid.
/// eta == 0 is accepted as the inviscid limit.
std::vector<std::string> validate(const PoroelasticParams& p);

struct DerivedCoefficients {
  std::array<double, 2> beta{};     // beta_1, beta_3
  double M_biot = 0.0;              // [Pa]
  Eigen::Matrix3d C = Eigen::Matrix3d::Zero();    // drained plane-strain matrix
  Eigen::Matrix3d C_u = Eigen::Matrix3d::Zero();  // undrained matrix C + M beta beta^T
  Eigen::Matrix4d E_mat = Eigen::Matrix4d::Zero();
  double rho_bulk = 0.0;
  std::array<double, 2> m{};        // alpha_inf_j rho_f / phi
  std::array<double, 2> a{};        // eta phi / (rho_f kappa_j)  [1/s]
  std::array<double, 2> Lambda{};   // viscous characteristic length [m]
  std::array<double, 2> lambda{};   // shift of the fractional derivative [1/s]
  std::array<double, 2> gamma{};    // eta / (kappa_j sqrt(lambda_j))
  std::array<double, 2> n{};        // eta/kappa_j + (rho_f/phi) sum_k r_k^j

  /// 2x2 inertia block [[rho, rho_f], [rho_f, m_j]] for one axis.
  Eigen::Matrix2d inertia(Axis axis, double rho_f) const;
};

/// Throws NonPhysical listing every violated invariant (bad input, M
/// denominator <= 0, E_mat or inertia blocks not positive definite).
/// `n` is initialised to eta/kappa_j; `set_drag_sums` adds the kernel part.
DerivedCoefficients derive_coefficients(const PoroelasticParams& p);

/// Same formulas without any checks; used when differentiating the map.
DerivedCoefficients derive_coefficients_unchecked(const PoroelasticParams& p);

/// n_j = eta/kappa_j + (rho_f/phi) * residue_sum_j.
void set_drag_sums(DerivedCoefficients& dc, const PoroelasticParams& p,
                   const std::array<double, 2>& residue_sums);

/// JKD dynamic tortuosity T_j(s), principal square-root branch. Throws
/// DomainError at s = 0.
std::complex<double> jkd_tortuosity(const PoroelasticParams& p, std::complex<double> s, Axis axis);

/// Stieltjes part D_j(s) = T_j(s) - a_j/s, evaluated in a cancellation-free
/// form. Throws DomainError at s = 0.
std::complex<double> d_function(const PoroelasticParams& p, std::complex<double> s, Axis axis);

/// Heterogeneous model: one parameter set per cell with eagerly derived
/// coefficients.
class MaterialField {
 public:
  MaterialField() = default;
  MaterialField(std::size_t nx, std::size_t nz, const PoroelasticParams& uniform);

  std::size_t nx() const { return nx_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return cells_.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }

  const PoroelasticParams& cell(std::size_t i, std::size_t j) const { return cells_[index(i, j)]; }
  const PoroelasticParams& cell(std::size_t flat) const { return cells_[flat]; }
  const DerivedCoefficients& derived(std::size_t flat) const { return derived_[flat]; }
  const std::vector<PoroelasticParams>& cells() const { return cells_; }

  /// Replaces one cell; throws NonPhysical if the new cell is invalid.
  void set_cell(std::size_t flat, const PoroelasticParams& p);
  void set_param(std::size_t flat, ParamId id, double value);
  double param(std::size_t flat, ParamId id) const { return get_param(cells_[flat], id); }

 private:
  std::size_t nx_ = 0;
  std::size_t nz_ = 0;
  std::vector<PoroelasticParams> cells_;
  std::vector<DerivedCoefficients> derived_;
};

}  // namespace pfwi
