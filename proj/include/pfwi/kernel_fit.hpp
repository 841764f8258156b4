#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pfwi/material.hpp"
#include "pfwi/multiprecision.hpp"

namespace pfwi {

enum class Spacing { linear, log };

/// Interpolation nodes omega_k in [omega_min, omega_max] rad/s; s_k = -i omega_k.
struct FrequencyGrid {
  std::size_t count = 20;
  Spacing spacing = Spacing::log;
  double omega_min = 0.0;
  double omega_max = 0.0;

  /// Throws ValidationError on an empty or inverted band.
  void validate() const;
  std::vector<double> nodes() const;

  /// Log-spaced grid over [f0/10, 10 f0] Hz.
  static FrequencyGrid around_source(double f0_hz, std::size_t count);
};

inline constexpr unsigned kDefaultPrecisionBits = 256;

/// Sampled Stieltjes data: z_k = -1/s_k, u_k = 1/s_k, v_k = D(s_k) - alpha_inf.
/// Values are held at `precision_bits`.
struct InterpolationData {
  std::vector<double> omega;
  std::vector<mp::Complex> s;
  std::vector<mp::Complex> z;
  std::vector<mp::Complex> u;
  std::vector<mp::Complex> v;
  double alpha_inf = 1.0;
  unsigned precision_bits = kDefaultPrecisionBits;

  std::size_t size() const { return s.size(); }
};

/// D(s) evaluated at high precision from the JKD formula.
mp::Complex d_function_mp(const PoroelasticParams& p, const mp::Complex& s, Axis axis);

InterpolationData sample_kernel(const PoroelasticParams& p, const FrequencyGrid& grid, Axis axis,
                                unsigned precision_bits = kDefaultPrecisionBits);

/// Samples of alpha_inf + sum r_k/(s - theta_k); used for round-trip checks.
InterpolationData sample_stieltjes(const std::vector<double>& omega, double alpha_inf,
                                   const std::vector<double>& poles,
                                   const std::vector<double>& residues,
                                   unsigned precision_bits = kDefaultPrecisionBits);

struct PickMatrices {
  mp::Matrix S1;
  mp::Matrix S2;
  unsigned precision_bits = kDefaultPrecisionBits;
};

/// Throws NodeCollision if s_p* - s_q vanishes at working precision.
PickMatrices assemble_pick_matrices(const InterpolationData& data);

/// S1 V = S2 V Phi with V* S2 V = I. `phi` is the diagonal of Phi.
struct GeneralizedEigen {
  mp::Matrix V;
  std::vector<mp::Real> phi;
};

/// Cholesky of S2 followed by a Hermitian Jacobi solve. Throws SingularPencil
/// when S2 is not numerically positive definite.
GeneralizedEigen solve_generalized_eig(const PickMatrices& pm);

/// Unrounded, unpruned expansion straight from the eigen solve.
struct MpPoleResidue {
  std::vector<mp::Real> poles;
  std::vector<mp::Real> residues;
  double alpha_inf = 1.0;
};

MpPoleResidue raw_pole_residue(const GeneralizedEigen& eig, const InterpolationData& data);

/// alpha_inf + sum r_k/(s - theta_k) at working precision.
mp::Complex evaluate_approx_mp(const MpPoleResidue& raw, const mp::Complex& s);

/// Max over fit nodes of |approx(s_i) - D(s_i)| / |D(s_i)|, at working precision.
double interpolation_defect(const MpPoleResidue& raw, const InterpolationData& data);

struct PoleResidueSet {
  Axis axis = Axis::x;
  std::vector<double> poles;
  std::vector<double> residues;
  double alpha_inf = 1.0;
  double a = 0.0;

  std::size_t size() const { return poles.size(); }
  double residue_sum() const;
  /// Throws SignViolation unless every pole < 0, residue > 0 and poles distinct.
  void certify() const;

  static PoleResidueSet empty(Axis axis, double alpha_inf, double a);
};

inline constexpr double kResidueDropTolerance = 1e-12;

/// Poles -Phi_kk, residues |C+ V(:,k)|^2; drops r_k < 1e-12 max r, rounds to
/// double and certifies.
PoleResidueSet extract_pole_residue(const GeneralizedEigen& eig, const InterpolationData& data,
                                    double alpha_inf, double a, Axis axis);

/// alpha_inf + sum r_k/(s - theta_k) (+ a/s when include_a). Throws
/// DomainError at a pole, or at s = 0 with include_a.
std::complex<double> evaluate_approx(const PoleResidueSet& prs, std::complex<double> s,
                                     bool include_a);

/// Max relative error |approx - D| / |D| over the validation nodes.
double fit_error(const PoleResidueSet& prs, const PoroelasticParams& p,
                 const FrequencyGrid& validation, Axis axis);

struct KernelFit {
  PoleResidueSet set;
  MpPoleResidue raw;
  double interpolation_defect = 0.0;
};

/// sample -> Pick matrices -> eigen -> extract in one call.
KernelFit fit_kernel(const PoroelasticParams& p, const FrequencyGrid& grid, Axis axis,
                     unsigned precision_bits = kDefaultPrecisionBits);

/// Text artifact with hex-float values: one block per axis.
void write_kernel_text(std::ostream& out, const std::vector<PoleResidueSet>& sets);
std::vector<PoleResidueSet> read_kernel_text(std::istream& in);
void write_kernel_file(const std::string& path, const std::vector<PoleResidueSet>& sets);
std::vector<PoleResidueSet> read_kernel_file(const std::string& path);

}  // namespace pfwi
