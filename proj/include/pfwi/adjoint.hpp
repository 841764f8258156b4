#pragma once

#include <cstdint>
#include <vector>

#include "pfwi/forward.hpp"

namespace pfwi {

/// R W - d per receiver, sample and component; masked entries exactly zero.
/// Throws GeometryMismatch unless geometry, sampling and masks agree.
SeismogramSet residual_sources(const SeismogramSet& sim, const SeismogramSet& obs);

/// Trapezoid weights over n samples at spacing dt (dt/2 at both ends).
std::vector<double> trapezoid_weights(std::size_t n, double dt);

struct AdjointOptions {
  bool accumulate_gradient = true;  // fill AdjointRun::acc
  bool source_adjoint = false;      // fill AdjointRun::amp_bar
  std::size_t snapshot_every = 0;   // 0 keeps no snapshots
};

struct AdjointRun {
  std::vector<Wavefield> snapshots;  // lambda at n = k * snapshot_every, descending n
  GradientAccumulator acc;
  std::vector<std::vector<double>> amp_bar;  // per source, per half-step amplitude
  double max_abs_final = 0.0;                // max |lambda_0|
};

/// Backward march from lambda(T) = 0 with adjoint sources w_n R^T residual_n.
/// `weights` has one entry per sample (trapezoid weights for the misfit
/// gradient, ones for the dot-product test). Forward states are rebuilt from
/// the checkpoints in `fwd`; throws MissingForwardRun if they are absent.
AdjointRun run_adjoint(const ForwardProblem& fp, const ForwardRun& fwd, const SeismogramSet& residual,
                       const std::vector<double>& weights, const AdjointOptions& opt);

struct DotProductResult {
  double forward_side = 0.0;  // <F u, v>
  double adjoint_side = 0.0;  // <u, F* v>
  double discrepancy = 0.0;   // |diff| / (|F u| |v|)
};

/// Random source-amplitude history u and random receiver history v.
DotProductResult dot_product_test(const ForwardProblem& fp, std::uint64_t seed);

}  // namespace pfwi
