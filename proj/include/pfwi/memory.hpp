#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "pfwi/kernel_fit.hpp"
#include "pfwi/material.hpp"

namespace pfwi {

/// One exact step of dTheta/dt = pole (Theta - q) with q linear between
/// q_begin and q_end. Requires pole < 0, dt > 0.
double theta_step(double theta, double q_begin, double q_end, double dt, double pole);

/// Theta_n = int_0^{t_n} (-pole) e^{pole (t_n - tau)} q(tau) dtau by the
/// trapezoid rule over the samples q_0..q_{n}. O(n^2).
std::vector<double> convolution_oracle(const std::vector<double>& q, double pole, double dt);

/// phi_k = q - Theta_k (zero initial data).
inline double phi_from_theta(double q, double theta) { return q - theta; }

/// RK4 solution of dphi/dt = pole phi + q'(t), phi(0) = 0, sampled at
/// t = n dt for n = 0..steps.
std::vector<double> integrate_phi_ode(const std::function<double(double)>& dq, double pole,
                                      double dt, std::size_t steps);

/// Quadrature for (2/pi) int_0^inf psi(y) dy after y = y_scale tan(theta).
struct DiffusiveQuadrature {
  std::vector<double> y;
  std::vector<double> w;  // includes the Jacobian and the 2/pi factor
};
DiffusiveQuadrature diffusive_quadrature(std::size_t nq, double y_scale);

/// (d/dt + lambda)^{1/2} q through the auxiliary fields psi(y, t) advanced by
/// exact exponential updates with q linear per step. q[0] must be 0.
/// y_scale <= 0 picks sqrt(max(lambda, 1/sqrt(T dt))).
std::vector<double> shifted_fracderiv_oracle(const std::vector<double>& q, double lambda,
                                             double dt, std::size_t nq = 200,
                                             double y_scale = 0.0);

/// Caputo half derivative (1/sqrt(pi)) int_0^t (t-tau)^{-1/2} f'(tau) dtau by
/// Gauss-Legendre after tau = t - u^2.
double caputo_half_derivative(const std::function<double(double)>& df, double t,
                              std::size_t nodes = 64);

/// (eta/kappa + rho_f/phi sum r) q - rho_f/phi sum r Theta_k along a q series,
/// Theta advanced with theta_step.
std::vector<double> pole_residue_drag(const std::vector<double>& q, const PoleResidueSet& prs,
                                      const PoroelasticParams& p, double dt);

/// gamma (d/dt + lambda)^{1/2} q from the diffusive oracle.
std::vector<double> jkd_drag_oracle(const std::vector<double>& q, const PoroelasticParams& p,
                                    Axis axis, double dt, std::size_t nq = 200);

}  // namespace pfwi
