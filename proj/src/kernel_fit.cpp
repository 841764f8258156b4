#include "pfwi/kernel_fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "pfwi/errors.hpp"

namespace pfwi {

using mp::Complex;
using mp::Real;

void FrequencyGrid::validate() const {
  if (count < 1) throw ValidationError("frequency grid needs at least one node");
  if (!(std::isfinite(omega_min) && std::isfinite(omega_max) && omega_min > 0.0))
    throw ValidationError("frequency band must be finite and positive");
  if (count > 1 && !(omega_max > omega_min))
    throw ValidationError("frequency band needs omega_max > omega_min");
}

std::vector<double> FrequencyGrid::nodes() const {
  validate();
  std::vector<double> w(count);
  if (count == 1) {
    w[0] = omega_min;
    return w;
  }
  const double denom = static_cast<double>(count - 1);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / denom;
    w[k] = spacing == Spacing::log ? omega_min * std::pow(omega_max / omega_min, t)
                                   : omega_min + t * (omega_max - omega_min);
  }
  w.back() = omega_max;
  return w;
}

FrequencyGrid FrequencyGrid::around_source(double f0_hz, std::size_t count) {
  const double two_pi = 2.0 * M_PI;
  return FrequencyGrid{count, Spacing::log, two_pi * f0_hz / 10.0, two_pi * f0_hz * 10.0};
}

Complex d_function_mp(const PoroelasticParams& p, const Complex& s, Axis axis) {
  if (s.re == 0 && s.im == 0) throw DomainError("D evaluated at s = 0");
  const std::size_t j = axis_index(axis);
  const Real ainf = p.alpha_inf[j];
  if (p.eta == 0.0) return Complex(ainf);
  const Real kap = p.kappa[j];
  const Real phi = p.phi;
  const Real eta = p.eta;
  const Real rho_f = p.rho_f;
  const Real Lam2 = 4 * ainf * kap / (phi * Real(p.pride[j]));
  const Real lambda = eta * phi * phi * Lam2 / (4 * ainf * ainf * kap * kap * rho_f);
  const Real a = eta * phi / (rho_f * kap);
  const Complex root = mp::sqrt(s / lambda + Real(1));
  return Complex(a / lambda) / (root + Real(1)) + ainf;
}

namespace {

InterpolationData make_nodes(const std::vector<double>& omega, double alpha_inf, unsigned bits) {
  InterpolationData d;
  d.omega = omega;
  d.alpha_inf = alpha_inf;
  d.precision_bits = bits;
  for (double w : omega) {
    Complex s{Real(0), Real(-w)};
    d.u.push_back(Complex(Real(1)) / s);
    d.z.push_back(-d.u.back());
    d.s.push_back(std::move(s));
  }
  return d;
}

}  // namespace

InterpolationData sample_kernel(const PoroelasticParams& p, const FrequencyGrid& grid, Axis axis,
                                unsigned precision_bits) {
  mp::PrecisionScope scope(precision_bits);
  const double ainf = p.alpha_inf[axis_index(axis)];
  InterpolationData d = make_nodes(grid.nodes(), ainf, precision_bits);
  for (const auto& s : d.s) d.v.push_back(d_function_mp(p, s, axis) - Real(ainf));
  return d;
}

InterpolationData sample_stieltjes(const std::vector<double>& omega, double alpha_inf,
                                   const std::vector<double>& poles,
                                   const std::vector<double>& residues, unsigned precision_bits) {
  if (poles.size() != residues.size()) throw ValidationError("poles/residues length mismatch");
  mp::PrecisionScope scope(precision_bits);
  InterpolationData d = make_nodes(omega, alpha_inf, precision_bits);
  for (const auto& s : d.s) {
    Complex acc;
    for (std::size_t k = 0; k < poles.size(); ++k)
      acc += Complex(Real(residues[k])) / (s - Real(poles[k]));
    d.v.push_back(acc);
  }
  return d;
}

PickMatrices assemble_pick_matrices(const InterpolationData& data) {
  const std::size_t n = data.size();
  if (n == 0 || data.v.size() != n) throw ValidationError("interpolation data is empty or ragged");
  mp::PrecisionScope scope(data.precision_bits);
  const Real eps = boost::multiprecision::ldexp(Real(1), -static_cast<int>(data.precision_bits));
  const Real ainf = data.alpha_inf;

  std::vector<Complex> D(n);
  for (std::size_t k = 0; k < n; ++k) D[k] = data.v[k] + ainf;

  PickMatrices pm{mp::Matrix(n), mp::Matrix(n), data.precision_bits};
  for (std::size_t p = 0; p < n; ++p) {
    const Complex sp_c = mp::conj(data.s[p]);
    const Complex Dp_c = mp::conj(D[p]);
    for (std::size_t q = 0; q < n; ++q) {
      const Complex den = sp_c - data.s[q];
      if (mp::abs(den) <= eps * (mp::abs(data.s[p]) + mp::abs(data.s[q])))
        throw NodeCollision("interpolation nodes " + std::to_string(p) + " and " +
                            std::to_string(q) + " collide at working precision");
      pm.S1(p, q) = (sp_c * Dp_c - data.s[q] * D[q]) / den - ainf;
      pm.S2(p, q) = (Dp_c - D[q]) / (data.s[q] - sp_c);
    }
  }
  pm.S1.symmetrize();
  pm.S2.symmetrize();
  return pm;
}

GeneralizedEigen solve_generalized_eig(const PickMatrices& pm) {
  const std::size_t n = pm.S2.size();
  mp::PrecisionScope scope(pm.precision_bits);
  const Real eps = boost::multiprecision::ldexp(Real(1), -static_cast<int>(pm.precision_bits));

  // S2 = L L*
  mp::Matrix L(n);
  for (std::size_t j = 0; j < n; ++j) {
    Real d = pm.S2(j, j).re;
    for (std::size_t k = 0; k < j; ++k) d -= mp::norm(L(j, k));
    if (!(d > eps * boost::multiprecision::abs(pm.S2(j, j).re)))
      throw SingularPencil("S2 is not positive definite at working precision (pivot " +
                           std::to_string(j) + ")");
    L(j, j) = Complex(boost::multiprecision::sqrt(d));
    for (std::size_t i = j + 1; i < n; ++i) {
      Complex acc = pm.S2(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= L(i, k) * mp::conj(L(j, k));
      L(i, j) = acc / L(j, j).re;
    }
  }

  // X = L^{-1} B, column by column
  auto lower_solve = [&](const mp::Matrix& B) {
    mp::Matrix X(n);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t i = 0; i < n; ++i) {
        Complex acc = B(i, c);
        for (std::size_t k = 0; k < i; ++k) acc -= L(i, k) * X(k, c);
        X(i, c) = acc / L(i, i).re;
      }
    return X;
  };

  mp::Matrix C = lower_solve(lower_solve(pm.S1).adjoint()).adjoint();
  C.symmetrize();
  mp::HermitianEigen he = mp::jacobi_eigen(std::move(C), pm.precision_bits);

  // V = L^{-*} Y
  GeneralizedEigen out;
  out.V = mp::Matrix(n);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t ii = n; ii-- > 0;) {
      Complex acc = he.vectors(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) acc -= mp::conj(L(k, ii)) * out.V(k, c);
      out.V(ii, c) = acc / L(ii, ii).re;
    }
  out.phi = std::move(he.values);
  return out;
}

MpPoleResidue raw_pole_residue(const GeneralizedEigen& eig, const InterpolationData& data) {
  const std::size_t n = data.size();
  mp::PrecisionScope scope(data.precision_bits);
  MpPoleResidue raw;
  raw.alpha_inf = data.alpha_inf;
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc;
    for (std::size_t i = 0; i < n; ++i) acc += data.v[i] * eig.V(i, k);
    raw.poles.push_back(-eig.phi[k]);
    raw.residues.push_back(mp::norm(acc));
  }
  return raw;
}

Complex evaluate_approx_mp(const MpPoleResidue& raw, const Complex& s) {
  Complex acc(Real(raw.alpha_inf));
  for (std::size_t k = 0; k < raw.poles.size(); ++k)
    acc += Complex(raw.residues[k]) / (s - raw.poles[k]);
  return acc;
}

double interpolation_defect(const MpPoleResidue& raw, const InterpolationData& data) {
  mp::PrecisionScope scope(data.precision_bits);
  Real worst = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Complex D = data.v[i] + Real(data.alpha_inf);
    const Real rel = mp::abs(evaluate_approx_mp(raw, data.s[i]) - D) / mp::abs(D);
    if (rel > worst) worst = rel;
  }
  return static_cast<double>(worst);
}

double PoleResidueSet::residue_sum() const {
  double s = 0.0;
  for (double r : residues) s += r;
  return s;
}

void PoleResidueSet::certify() const {
  if (poles.size() != residues.size()) throw SignViolation("pole/residue count mismatch");
  for (std::size_t k = 0; k < poles.size(); ++k) {
    if (!(std::isfinite(poles[k]) && poles[k] < 0.0))
      throw SignViolation("pole " + std::to_string(k) + " is not negative");
    if (!(std::isfinite(residues[k]) && residues[k] > 0.0))
      throw SignViolation("residue " + std::to_string(k) + " is not positive");
    for (std::size_t l = 0; l < k; ++l)
      if (poles[l] == poles[k]) throw SignViolation("repeated pole after rounding");
  }
}

PoleResidueSet PoleResidueSet::empty(Axis axis, double alpha_inf, double a) {
  PoleResidueSet s;
  s.axis = axis;
  s.alpha_inf = alpha_inf;
  s.a = a;
  return s;
}

PoleResidueSet extract_pole_residue(const GeneralizedEigen& eig, const InterpolationData& data,
                                    double alpha_inf, double a, Axis axis) {
  MpPoleResidue raw = raw_pole_residue(eig, data);
  mp::PrecisionScope scope(data.precision_bits);
  Real rmax = 0;
  for (const auto& r : raw.residues)
    if (r > rmax) rmax = r;
  PoleResidueSet out = PoleResidueSet::empty(axis, alpha_inf, a);
  std::vector<std::pair<double, double>> kept;
  for (std::size_t k = 0; k < raw.poles.size(); ++k) {
    if (raw.residues[k] < rmax * kResidueDropTolerance) continue;
    kept.emplace_back(static_cast<double>(raw.poles[k]), static_cast<double>(raw.residues[k]));
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& x, const auto& y) { return x.first > y.first; });
  for (const auto& [pole, res] : kept) {
    out.poles.push_back(pole);
    out.residues.push_back(res);
  }
  out.certify();
  return out;
}

std::complex<double> evaluate_approx(const PoleResidueSet& prs, std::complex<double> s,
                                     bool include_a) {
  std::complex<double> acc = prs.alpha_inf;
  for (std::size_t k = 0; k < prs.size(); ++k) {
    const std::complex<double> d = s - prs.poles[k];
    if (d == 0.0) throw DomainError("approximation evaluated at a pole");
    acc += prs.residues[k] / d;
  }
  if (include_a) {
    if (s == 0.0) throw DomainError("approximation with a/s evaluated at s = 0");
    acc += prs.a / s;
  }
  return acc;
}

double fit_error(const PoleResidueSet& prs, const PoroelasticParams& p,
                 const FrequencyGrid& validation, Axis axis) {
  double worst = 0.0;
  for (double w : validation.nodes()) {
    const std::complex<double> s(0.0, -w);
    const std::complex<double> exact = d_function(p, s, axis);
    worst = std::max(worst, std::abs(evaluate_approx(prs, s, false) - exact) / std::abs(exact));
  }
  return worst;
}

KernelFit fit_kernel(const PoroelasticParams& p, const FrequencyGrid& grid, Axis axis,
                     unsigned precision_bits) {
  const std::size_t j = axis_index(axis);
  const double a = p.eta * p.phi / (p.rho_f * p.kappa[j]);
  KernelFit fit;
  if (p.eta == 0.0) {
    fit.set = PoleResidueSet::empty(axis, p.alpha_inf[j], 0.0);
    fit.raw.alpha_inf = p.alpha_inf[j];
    return fit;
  }
  InterpolationData data = sample_kernel(p, grid, axis, precision_bits);
  GeneralizedEigen eig = solve_generalized_eig(assemble_pick_matrices(data));
  fit.raw = raw_pole_residue(eig, data);
  fit.interpolation_defect = interpolation_defect(fit.raw, data);
  fit.set = extract_pole_residue(eig, data, p.alpha_inf[j], a, axis);
  return fit;
}

namespace {

std::string hex(double x) {
  std::ostringstream o;
  o << std::hexfloat << x;
  return o.str();
}

double parse_double(const std::string& tok, int line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("kernel file line " + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace

void write_kernel_text(std::ostream& out, const std::vector<PoleResidueSet>& sets) {
  out << "# pfwi kernel v1\n";
  for (const auto& s : sets) {
    out << "axis " << static_cast<int>(s.axis) << "\n";
    out << "N " << s.size() << "\n";
    out << "alpha_inf " << hex(s.alpha_inf) << "\n";
    out << "a " << hex(s.a) << "\n";
    for (std::size_t k = 0; k < s.size(); ++k)
      out << "pole_residue " << hex(s.poles[k]) << " " << hex(s.residues[k]) << "\n";
  }
}

std::vector<PoleResidueSet> read_kernel_text(std::istream& in) {
  std::vector<PoleResidueSet> sets;
  std::string line;
  int lineno = 0;
  std::vector<std::size_t> expected;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "axis") {
      int ax = 0;
      ls >> ax;
      if (ax != 1 && ax != 3) throw ParseError("kernel file line " + std::to_string(lineno) + ": axis must be 1 or 3");
      sets.push_back(PoleResidueSet::empty(ax == 1 ? Axis::x : Axis::z, 1.0, 0.0));
      expected.push_back(0);
      continue;
    }
    if (sets.empty()) throw ParseError("kernel file line " + std::to_string(lineno) + ": entry before axis");
    auto& s = sets.back();
    std::string a, b;
    if (key == "N") {
      ls >> expected.back();
    } else if (key == "alpha_inf") {
      ls >> a;
      s.alpha_inf = parse_double(a, lineno);
    } else if (key == "a") {
      ls >> a;
      s.a = parse_double(a, lineno);
    } else if (key == "pole_residue") {
      ls >> a >> b;
      s.poles.push_back(parse_double(a, lineno));
      s.residues.push_back(parse_double(b, lineno));
    } else {
      throw ParseError("kernel file line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (sets[k].size() != expected[k]) throw ParseError("kernel file: pole count does not match N");
    sets[k].certify();
  }
  return sets;
}

void write_kernel_file(const std::string& path, const std::vector<PoleResidueSet>& sets) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_kernel_text(f, sets);
  if (!f) throw IoError("write failed: " + path);
}

std::vector<PoleResidueSet> read_kernel_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return read_kernel_text(f);
}

}  // namespace pfwi
