#pragma once

#include <cstddef>
#include <vector>

namespace pfwi {

struct SystemOperators;

/// Energy components and dissipation rates of one state.
struct EnergyParts {
  double E1 = 0.0;        // kinetic: 1/2 [v q] Mv [v q]
  double E2 = 0.0;        // strain: 1/2 sigma^T E^{-1} sigma
  double E3 = 0.0;        // memory-variable augmentation
  double D = 0.0;         // viscous dissipation rate
  double D_sponge = 0.0;  // absorbing-layer dissipation rate

  double total() const { return E1 + E2 + E3; }
};

struct EnergySample {
  double t = 0.0;
  EnergyParts parts;
  double Etot = 0.0;
  /// |(E - E_prev)/dt + (D + D_sponge) averaged over the interval|, in
  /// energy per second. Zero for the first sample.
  double balance = 0.0;
};

struct EnergyLedger {
  std::vector<EnergySample> samples;
  double source_end = 0.0;  // time after which no source acts

  void append(double t, const EnergyParts& parts);
};

/// All components, integrated at native nodes with weight dx dz.
EnergyParts energy_parts(const SystemOperators& ops, const double* u);

double energy_E1(const SystemOperators& ops, const double* u);
double energy_E2(const SystemOperators& ops, const double* u);
double energy_E3_augmented(const SystemOperators& ops, const double* u);
double dissipation_rate(const SystemOperators& ops, const double* u);
double sponge_dissipation(const SystemOperators& ops, const double* u);

struct DecayReport {
  bool monotone = true;
  double worst_increase = 0.0;  // largest (E(t_{k+1}) - E(t_k)) / E(t_k)
  double worst_balance = 0.0;   // largest balance residual after t_start
  double peak_energy = 0.0;     // largest E_tot over the whole ledger
  std::size_t checked = 0;
};

/// Checks E(t_{k+1}) <= E(t_k) (1 + rel_tol) for t >= t_start. Throws
/// DecayViolation when `strict`.
DecayReport check_decay(const EnergyLedger& ledger, double rel_tol, double t_start, bool strict = true);

/// Pairwise (cascade) summation.
double pairwise_sum(const double* x, std::size_t n);

}  // namespace pfwi
