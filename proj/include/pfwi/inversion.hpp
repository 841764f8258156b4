#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pfwi/adjoint.hpp"
#include "pfwi/forward.hpp"

namespace pfwi {

/// chi = sum_r sum_n w_n 1/2 |R W - d|^2 with trapezoid weights w_n.
double misfit(const SeismogramSet& sim, const SeismogramSet& obs);

struct ParameterBound {
  ParamId id = ParamId::kappa_1;
  double lower = 0.0;
  double upper = 0.0;
  double scale = 1.0;  // optimisation works on p / scale
};

struct ParameterSelection {
  std::vector<ParameterBound> params;
  std::vector<std::uint8_t> region;  // per cell, 1 = inverted; empty = every cell

  /// Throws ValidationError listing every problem.
  void validate(std::size_t n_cells) const;
  bool in_region(std::size_t cell) const { return region.empty() || region[cell] != 0; }
};

/// dchi/dp per selected parameter and cell; zero outside the region.
struct GradientField {
  Grid2D grid;
  std::vector<ParamId> params;
  std::vector<std::vector<double>> values;  // [param][cell]

  void reset(const Grid2D& g, const ParameterSelection& sel);
  double max_abs() const;
};

/// Contracts the accumulated adjoint/forward products with the parameter
/// derivatives of every node's coefficient blocks and adds the result to `g`.
void accumulate_gradient(const ForwardProblem& fp, const GradientAccumulator& acc,
                         const ParameterSelection& sel, GradientField& g);

/// One shot: its sources and the data recorded for it.
struct Shot {
  std::vector<SourceSpec> sources;
  SeismogramSet observed;
};

/// Fixed acquisition, kernels and discretization shared by every model.
struct Survey {
  Grid2D grid;
  KernelPair kernels;
  SimConfig sim;
  Discretization disc;
  std::vector<ReceiverSpec> receivers;
  std::vector<Shot> shots;
};

/// Builds a survey whose dt and sponge come from `base`; observed traces are
/// left empty.
Survey make_survey(const MaterialField& base, const Grid2D& grid, const KernelPair& k,
                   const SimConfig& sim, const std::vector<std::vector<SourceSpec>>& shots,
                   const std::vector<ReceiverSpec>& receivers);

/// Fills every shot's observed traces by simulating `truth`.
void synthesize_observed(Survey& survey, const MaterialField& truth);

struct Evaluation {
  double chi = 0.0;
  GradientField gradient;  // empty unless requested
};

/// Misfit summed over shots and, when `sel` is given, its gradient.
Evaluation evaluate(const Survey& survey, const MaterialField& mf, const ParameterSelection* sel);

struct GradientProbe {
  std::size_t cell = 0;
  ParamId id = ParamId::kappa_1;
  double adjoint = 0.0;
  double finite_difference = 0.0;
  double rel_error = 0.0;
};

struct GradientCheck {
  std::vector<GradientProbe> probes;
  double max_rel_error = 0.0;
};

/// Central differences of chi with h = fd_step * scale at n_probes random
/// (cell, parameter) pairs. Probes are drawn among cells where |G| is at
/// least `min_fraction` of its maximum for that parameter.
GradientCheck fd_gradient_check(const Survey& survey, const MaterialField& mf,
                                const ParameterSelection& sel, std::size_t n_probes,
                                std::uint64_t seed, double fd_step = 1e-4,
                                double min_fraction = 1e-2);

struct MisfitReport {
  std::size_t iteration = 0;
  double chi = 0.0;
  double grad_norm = 0.0;  // in scaled variables
  double step = 0.0;
  std::size_t evaluations = 0;
};

struct InversionOptions {
  std::size_t max_iterations = 20;
  double grad_tol = 1e-8;       // relative to the first gradient norm
  double armijo_c1 = 1e-4;
  std::size_t max_backtracks = 30;
  double initial_step = 0.25;   // largest scaled change of the first trial step
  double chi_floor = 0.0;       // stop once chi <= chi_floor
  /// Called after every accepted iterate.
  std::function<void(const MaterialField&, const MisfitReport&)> on_iterate;
};

enum class InversionStatus { converged, max_iterations, line_search_failure };

struct InversionResult {
  MaterialField model;
  std::vector<MisfitReport> history;  // entry 0 is the initial model
  InversionStatus status = InversionStatus::max_iterations;
};

/// Projected gradient descent with Armijo backtracking in scaled variables.
/// Trial steps after the first use the Barzilai-Borwein length s's / s'y.
InversionResult invert(const Survey& survey, const MaterialField& initial,
                       const ParameterSelection& sel, const InversionOptions& opt);

std::string status_name(InversionStatus s);

}  // namespace pfwi
