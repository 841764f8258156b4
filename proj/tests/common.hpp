#pragma once

#include <chrono>
#include <cmath>
#include <complex>
#include <vector>

#include "pfwi/forward.hpp"
#include "pfwi/kernel_fit.hpp"
#include "pfwi/material.hpp"

namespace pfwi::test {

/// Sandstone-like desk material used by most grid tests.
inline PoroelasticParams desk_material(double kappa = 1e-9) {
  PoroelasticParams p;
  p.phi = 0.2;
  p.rho_s = 2500.0;
  p.rho_f = 1000.0;
  p.eta = 1e-3;
  p.K_s = 40e9;
  p.K_f = 2.5e9;
  p.kappa = {kappa, kappa};
  p.alpha_inf = {2.0, 2.0};
  p.stiffness = {16e9, 4e9, 4e9, 16e9, 6e9};
  return p;
}

/// Tight material for the kernel-fit checks (eta 1e-3, phi 0.3, kappa 1e-11,
/// alpha_inf 2, rho_f 1000); the solid part only has to be admissible.
inline PoroelasticParams jkd_material() {
  PoroelasticParams p;
  p.phi = 0.3;
  p.rho_s = 2650.0;
  p.rho_f = 1000.0;
  p.eta = 1e-3;
  p.K_s = 36e9;
  p.K_f = 2.2e9;
  p.kappa = {1e-11, 1e-11};
  p.alpha_inf = {2.0, 2.0};
  p.stiffness = {20e9, 6e9, 6e9, 20e9, 7e9};
  return p;
}

/// T(s) written out directly from the JKD model, with
/// Lambda^2 = 4 alpha_inf kappa / (phi P).
inline std::complex<double> direct_tortuosity(const PoroelasticParams& p, std::complex<double> s,
                                              std::size_t j) {
  const double ainf = p.alpha_inf[j], kap = p.kappa[j];
  const double lam2 = 4.0 * ainf * kap / (p.phi * p.pride[j]);
  const std::complex<double> root =
      std::sqrt(1.0 + s * (4.0 * ainf * ainf * kap * kap * p.rho_f) / (p.eta * lam2 * p.phi * p.phi));
  return ainf + p.eta * p.phi / (s * kap * p.rho_f) * root;
}

inline KernelPair fitted_pair(const PoroelasticParams& p, double f0, std::size_t count) {
  const FrequencyGrid fg = FrequencyGrid::around_source(f0, count);
  return {fit_kernel(p, fg, Axis::x).set, fit_kernel(p, fg, Axis::z).set};
}

inline SourceSpec explosive(double x, double z, double f0) {
  SourceSpec s;
  s.x = x;
  s.z = z;
  s.wavelet.f0 = f0;
  s.channel = SourceChannel::stress;
  s.c1 = 1.0;
  s.c2 = 1.0;
  return s;
}

inline ReceiverSpec receiver(double x, double z, std::size_t nc, std::initializer_list<std::size_t> comps) {
  ReceiverSpec r;
  r.x = x;
  r.z = z;
  r.mask = component_mask(nc, comps);
  return r;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

}  // namespace pfwi::test
