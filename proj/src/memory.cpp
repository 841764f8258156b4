#include "pfwi/memory.hpp"

#include <cmath>
#include <memory>

#include <gsl/gsl_integration.h>

#include "pfwi/errors.hpp"

namespace pfwi {

namespace {

// (e^z - 1 - z ... ) helpers for exact integrals of linear forcing.
double e_minus_phi1(double z) {  // e^z - (e^z - 1)/z
  if (std::abs(z) < 1e-3) return z * (0.5 + z * (1.0 / 3.0 + z * (1.0 / 8.0 + z / 30.0)));
  return std::exp(z) - std::expm1(z) / z;
}

double decay_phi1(double x) {  // (1 - e^{-x})/x
  if (x < 1e-3) return 1.0 - x * (0.5 - x * (1.0 / 6.0 - x / 24.0));
  return -std::expm1(-x) / x;
}

double decay_phi2(double x) {  // (x - 1 + e^{-x})/x^2
  if (x < 1e-3) return 0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0));
  return (x + std::expm1(-x)) / (x * x);
}

struct GlTable {
  explicit GlTable(std::size_t n) : t(gsl_integration_glfixed_table_alloc(n)) {
    if (!t) throw ValidationError("cannot build Gauss-Legendre table");
  }
  ~GlTable() { gsl_integration_glfixed_table_free(t); }
  GlTable(const GlTable&) = delete;
  GlTable& operator=(const GlTable&) = delete;
  gsl_integration_glfixed_table* t;
};

}  // namespace

double theta_step(double theta, double q_begin, double q_end, double dt, double pole) {
  const double z = pole * dt;
  const double E = std::exp(z);
  return E * theta + q_end * (1.0 - E) + (q_end - q_begin) * e_minus_phi1(z);
}

std::vector<double> convolution_oracle(const std::vector<double>& q, double pole, double dt) {
  std::vector<double> out(q.size(), 0.0);
  for (std::size_t n = 1; n < q.size(); ++n) {
    double acc = 0.0;
    for (std::size_t m = 0; m <= n; ++m) {
      const double w = (m == 0 || m == n) ? 0.5 : 1.0;
      acc += w * (-pole) * std::exp(pole * static_cast<double>(n - m) * dt) * q[m];
    }
    out[n] = acc * dt;
  }
  return out;
}

std::vector<double> integrate_phi_ode(const std::function<double(double)>& dq, double pole,
                                      double dt, std::size_t steps) {
  std::vector<double> phi(steps + 1, 0.0);
  auto f = [&](double t, double y) { return pole * y + dq(t); };
  double y = 0.0;
  for (std::size_t n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) * dt;
    const double k1 = f(t, y);
    const double k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1);
    const double k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2);
    const double k4 = f(t + dt, y + dt * k3);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    phi[n + 1] = y;
  }
  return phi;
}

DiffusiveQuadrature diffusive_quadrature(std::size_t nq, double y_scale) {
  if (nq == 0 || !(y_scale > 0.0)) throw ValidationError("diffusive quadrature needs nq > 0 and y_scale > 0");
  GlTable gl(nq);
  DiffusiveQuadrature dq;
  for (std::size_t m = 0; m < nq; ++m) {
    double th = 0.0, wt = 0.0;
    gsl_integration_glfixed_point(0.0, M_PI / 2.0, m, &th, &wt, gl.t);
    const double c = std::cos(th);
    dq.y.push_back(y_scale * std::tan(th));
    dq.w.push_back((2.0 / M_PI) * wt * y_scale / (c * c));
  }
  return dq;
}

std::vector<double> shifted_fracderiv_oracle(const std::vector<double>& q, double lambda,
                                             double dt, std::size_t nq, double y_scale) {
  std::vector<double> out(q.size(), 0.0);
  if (q.size() < 2) return out;
  if (y_scale <= 0.0) {
    const double T = dt * static_cast<double>(q.size() - 1);
    y_scale = std::sqrt(std::max(lambda, 1.0 / std::sqrt(T * dt)));
  }
  const DiffusiveQuadrature quad = diffusive_quadrature(nq, y_scale);
  std::vector<double> psi(nq, 0.0), E(nq), p1(nq), p2(nq);
  for (std::size_t m = 0; m < nq; ++m) {
    const double x = (quad.y[m] * quad.y[m] + lambda) * dt;
    E[m] = std::exp(-x);
    p1[m] = decay_phi1(x) * dt;
    p2[m] = decay_phi2(x) * dt;
  }
  for (std::size_t n = 0; n + 1 < q.size(); ++n) {
    const double dq = (q[n + 1] - q[n]) / dt;
    const double g0 = lambda * q[n] + dq;
    const double g1 = lambda * q[n + 1] + dq;
    double acc = 0.0;
    for (std::size_t m = 0; m < nq; ++m) {
      psi[m] = E[m] * psi[m] + g0 * p1[m] + (g1 - g0) * p2[m];
      acc += quad.w[m] * psi[m];
    }
    out[n + 1] = acc;
  }
  return out;
}

double caputo_half_derivative(const std::function<double(double)>& df, double t,
                              std::size_t nodes) {
  if (t <= 0.0) return 0.0;
  GlTable gl(nodes);
  const double ub = std::sqrt(t);
  double acc = 0.0;
  for (std::size_t m = 0; m < nodes; ++m) {
    double u = 0.0, w = 0.0;
    gsl_integration_glfixed_point(0.0, ub, m, &u, &w, gl.t);
    acc += w * 2.0 * df(t - u * u);
  }
  return acc / std::sqrt(M_PI);
}

std::vector<double> pole_residue_drag(const std::vector<double>& q, const PoleResidueSet& prs,
                                      const PoroelasticParams& p, double dt) {
  const std::size_t j = axis_index(prs.axis);
  const double c = p.rho_f / p.phi;
  const double n_j = p.eta / p.kappa[j] + c * prs.residue_sum();
  std::vector<double> theta(prs.size(), 0.0);
  std::vector<double> out(q.size(), 0.0);
  for (std::size_t n = 0; n < q.size(); ++n) {
    if (n > 0)
      for (std::size_t k = 0; k < prs.size(); ++k)
        theta[k] = theta_step(theta[k], q[n - 1], q[n], dt, prs.poles[k]);
    double mem = 0.0;
    for (std::size_t k = 0; k < prs.size(); ++k) mem += prs.residues[k] * theta[k];
    out[n] = n_j * q[n] - c * mem;
  }
  return out;
}

std::vector<double> jkd_drag_oracle(const std::vector<double>& q, const PoroelasticParams& p,
                                    Axis axis, double dt, std::size_t nq) {
  const DerivedCoefficients dc = derive_coefficients(p);
  const std::size_t j = axis_index(axis);
  std::vector<double> out = shifted_fracderiv_oracle(q, dc.lambda[j], dt, nq);
  for (double& x : out) x *= dc.gamma[j];
  return out;
}

}  // namespace pfwi
