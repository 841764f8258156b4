#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

#include "pfwi/energy.hpp"
#include "pfwi/grid.hpp"
#include "pfwi/operators.hpp"
#include "pfwi/wavefield.hpp"

namespace pfwi {

/// a (1 - 2 pi^2 f0^2 (t-t0)^2) exp(-pi^2 f0^2 (t-t0)^2), exactly zero where
/// the magnitude would fall below 1e-12 of the peak.
struct Ricker {
  double f0 = 10.0;
  double t0 = -1.0;  // negative selects 2 / f0
  double amplitude = 1.0;

  double delay() const { return t0 < 0.0 ? 2.0 / f0 : t0; }
  double operator()(double t) const;
  /// Half-width of the retained support around t0.
  double half_support() const;
  double end_time() const { return delay() + half_support(); }
};

enum class SourceChannel { force, stress };

/// force: (c1, c2) = (f_x, f_z) on the solid momentum rows.
/// stress: (c1, c2) = (f_11, f_33) stress rate, entering as C^{-1} f.
struct SourceSpec {
  double x = 0.0;
  double z = 0.0;
  Ricker wavelet;
  SourceChannel channel = SourceChannel::force;
  double c1 = 0.0;
  double c2 = 1.0;
};

/// Source placed on the grid with its amplitude tabulated at half steps:
/// amp[m] is the wavelet at t = m dt / 2.
struct PlacedSource {
  SourceChannel channel = SourceChannel::force;
  std::array<Stencil4, 2> stencil;  // force: X and Z nodes; stress: C nodes twice
  double c1 = 0.0;
  double c2 = 0.0;
  std::vector<double> amp;
};

struct ReceiverSpec {
  double x = 0.0;
  double z = 0.0;
  std::vector<std::uint8_t> mask;  // one byte per component, 1 = recorded

  bool operator==(const ReceiverSpec&) const = default;
};

/// Receivers sample every field with the tent weights of that field's nodes.
struct PlacedReceiver {
  std::array<Stencil4, 4> stencil;  // per node set
  std::vector<std::uint8_t> mask;
};

/// Traces d(y_r, t_n) for n = 0..n_samples-1 at spacing dt; masked-out
/// components are exact zeros. Layout [receiver][sample][component].
struct SeismogramSet {
  double dt = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_components = 0;
  std::vector<ReceiverSpec> receivers;
  std::vector<double> data;

  std::size_t n_receivers() const { return receivers.size(); }
  double& at(std::size_t r, std::size_t n, std::size_t c) {
    return data[(r * n_samples + n) * n_components + c];
  }
  double at(std::size_t r, std::size_t n, std::size_t c) const {
    return data[(r * n_samples + n) * n_components + c];
  }
  void resize(std::size_t nr, std::size_t ns, std::size_t nc);
  bool operator==(const SeismogramSet&) const = default;
};

enum class Backend { serial, omp };

struct SimConfig {
  double t_final = 0.0;
  double dt = 0.0;            // 0 selects cfl_safety * stability limit
  double cfl_safety = 0.5;
  BoundaryConfig boundary;
  std::size_t snapshot_every = 0;    // 0 disables snapshots
  std::size_t energy_every = 0;      // 0 disables the energy ledger
  std::size_t checkpoint_every = 0;  // 0 picks ~sqrt(n_steps)
  Backend backend = Backend::omp;
};

/// dt from the config (checked against the stability limit) or from CFL, and
/// the sponge profile from the base model's fastest speed.
Discretization resolve_discretization(const MaterialField& base, const Grid2D& grid,
                                      const SimConfig& sim);

/// Everything needed to march one model: operators and placed geometry.
struct ForwardProblem {
  Grid2D grid;
  SimConfig sim;
  Discretization disc;
  SystemOperators ops;
  std::vector<PlacedSource> sources;
  std::vector<PlacedReceiver> receivers;
  std::vector<ReceiverSpec> receiver_specs;

  std::size_t n_components() const { return ops.n_fields(); }
};

/// Places sources/receivers (OutOfDomain outside the non-sponge interior) and
/// assembles operators. `disc` fixes dt and sponge; pass the base model's.
ForwardProblem build_problem(const MaterialField& mf, const Grid2D& grid, const KernelPair& k,
                             const std::vector<SourceSpec>& sources,
                             const std::vector<ReceiverSpec>& receivers, const SimConfig& sim,
                             const Discretization& disc);

PlacedSource place_source(const Grid2D& g, const SourceSpec& s, const Discretization& disc,
                          bool periodic, std::size_t margin);
PlacedReceiver place_receiver(const Grid2D& g, const ReceiverSpec& r, std::size_t n_components,
                              bool periodic, std::size_t margin);

/// Tent-weighted spread of `amp` into field f (transpose of sample_field).
void spread_field(double* u, std::size_t n_nodes, std::size_t f, const Stencil4& st, double amp);
double sample_field(const double* u, std::size_t n_nodes, std::size_t f, const Stencil4& st);

/// Per-node accumulators of outer products used by the parameter gradient.
struct GradientAccumulator {
  std::size_t n1 = 0, n3 = 0;
  std::vector<double> inv_x, inv_z;   // 2x2 per node: kbar (v,q) x z (v,q)
  std::vector<double> inv_c;          // 3x3 per node
  std::vector<double> inv_xz;         // 1 per node
  std::vector<double> src_c;          // 2x2 per node: g (tau11,tau33) x f
  std::vector<double> exp_x, exp_z;   // (2+N)^2 per node

  void reset(std::size_t nodes, std::size_t n1_, std::size_t n3_);
};

/// One explicit step u_n -> u_{n+1} = P H K H u_n and its exact transpose.
class Stepper {
 public:
  Stepper(const ForwardProblem& fp);

  /// Advances state in place from step n to n+1. Throws Instability on
  /// non-finite values.
  void step(double* u, std::size_t n);

  /// lam <- (dPhi/du)^T lam for step n. When `acc` is set, the forward stages
  /// are recomputed from u_n and parameter outer products accumulated. When
  /// `amp_bar` is set (one vector per source, 2 n_steps + 1 entries), source
  /// amplitude sensitivities are accumulated.
  void step_adjoint(double* lam, std::size_t n, const double* u_n, GradientAccumulator* acc,
                    std::vector<std::vector<double>>* amp_bar);

  std::size_t state_size() const { return nf_ * nodes_; }

 private:
  void add_sources(double* z, std::size_t m) const;
  void transport(const double* u, double* z) const;
  void inv_mass(double* z) const;
  void local(double* u, bool transpose) const;

  const ForwardProblem& fp_;
  kernels::KernelView kv_;
  std::size_t nodes_, nf_, nt_;
  std::vector<double> a_, y_, k_, b_, zraw_[4];
  std::vector<double> ab_, bb_, kb_, g_, yb_, u0_;
};

struct ForwardRun {
  SeismogramSet traces;
  EnergyLedger ledger;
  std::vector<Wavefield> snapshots;            // every snapshot_every steps
  std::vector<std::vector<double>> checkpoints;  // state at n = k * checkpoint_every
  std::size_t checkpoint_every = 1;
  std::size_t n_steps = 0;
  double dt = 0.0;
};

/// Marches n_steps from rest, recording traces at every step (including t=0).
ForwardRun run_forward(const ForwardProblem& fp);

/// Convenience: resolve discretization from `mf`, build and run.
ForwardRun simulate(const MaterialField& mf, const Grid2D& grid, const KernelPair& k,
                    const std::vector<SourceSpec>& sources,
                    const std::vector<ReceiverSpec>& receivers, const SimConfig& sim);

/// Mask with the given field slots enabled.
std::vector<std::uint8_t> component_mask(std::size_t n_components,
                                         std::initializer_list<std::size_t> fields);

}  // namespace pfwi
