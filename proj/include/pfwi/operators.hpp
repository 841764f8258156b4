#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pfwi/grid.hpp"
#include "pfwi/kernel_fit.hpp"
#include "pfwi/kernels.hpp"
#include "pfwi/material.hpp"

namespace pfwi {

/// Fitted memory kernels for axis 1 (x) and axis 3 (z).
struct KernelPair {
  PoleResidueSet x;
  PoleResidueSet z;

  const PoleResidueSet& operator[](std::size_t j) const { return j == 0 ? x : z; }
  static KernelPair empty(const PoroelasticParams& p);
};

struct BoundaryConfig {
  enum class Kind { sponge, periodic };
  Kind kind = Kind::sponge;
  std::size_t width = 20;   // cells
  double strength = 20.0;   // dimensionless; s_max = strength c_ref / (width h)

  bool periodic() const { return kind == Kind::periodic; }
};

/// The assembly map: every coefficient block of one staggered node computed
/// from (averaged) raw parameters. No validation, so it can be differentiated
/// by finite differences.
struct NodeMatrices {
  std::array<Eigen::Matrix2d, 2> mv;      // [[rho, rho_f], [rho_f, m_j]]
  std::array<Eigen::Matrix2d, 2> mv_inv;
  Eigen::Matrix3d e3;                     // E restricted to (tau11, tau33, -p)
  Eigen::Matrix3d e3_inv;
  Eigen::Matrix2d c2_inv;                 // inverse of [[c11, c13], [c13, c33]]
  double c55 = 0.0;
  std::array<Eigen::MatrixXd, 2> gen;     // local generator on (v, q, Theta)
  std::array<double, 2> darcy{};          // eta / kappa_j
  double mem = 0.0;                       // rho_f / phi
};

NodeMatrices node_matrices(const PoroelasticParams& p, const KernelPair& k);

/// Cells (and weights) averaged onto node (i, j) of a node set; boundary
/// neighbours are clipped, or wrapped when periodic.
using CellWeights = std::vector<std::pair<std::size_t, double>>;
CellWeights node_cells(const Grid2D& g, NodeSet s, std::size_t i, std::size_t j, bool periodic);
PoroelasticParams averaged_params(const std::vector<PoroelasticParams>& cells, const CellWeights& w);

/// Per node set: node -> unique averaged material.
struct NodeTable {
  std::vector<std::uint32_t> index;
  std::vector<PoroelasticParams> params;
};

/// Time step and damping profile, resolved once from a base model and reused
/// for every perturbed model so runs stay comparable.
struct Discretization {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::array<std::vector<double>, 4> sponge_rate;  // per node set, empty when none
};

struct SystemOperators {
  Grid2D grid;
  bool periodic = false;
  double dt = 0.0;
  KernelPair kernels;
  std::size_t n1 = 0;
  std::size_t n3 = 0;
  std::array<NodeTable, 4> tables;
  std::array<std::vector<NodeMatrices>, 4> unique;  // per node set, per unique material

  // flat arrays consumed by the kernels
  std::vector<double> mvinv_x, mvinv_z, e3, c55, expo_x, expo_z;
  std::array<std::vector<double>, 4> sponge_rate;
  std::array<std::vector<double>, 4> sponge_factor;

  kernels::KernelView view() const;
  std::size_t n_fields() const { return 8 + n1 + n3; }
};

/// Throws GeometryMismatch when the material and grid disagree and
/// NonPhysical when an averaged node fails the positivity checks.
SystemOperators assemble_system(const MaterialField& mf, const Grid2D& grid, const KernelPair& k,
                                const Discretization& disc, bool periodic);

/// exp(gen * h) for the local block.
Eigen::MatrixXd local_exponential(const Eigen::MatrixXd& gen, double h);

/// Fast-P, slow-P and shear speeds along unit direction (nx, nz), from the
/// undamped symbol; sorted descending.
std::array<double, 3> plane_wave_speeds(const PoroelasticParams& p, double nx, double nz);

/// Largest fast-P speed over all cells and sampled directions.
double max_wave_speed(const MaterialField& mf);

/// safety * min(dx, dz) / (c_max * 7/6).
double cfl_dt(const MaterialField& mf, const Grid2D& grid, double safety);

/// Cosine-taper sponge rates s(x) >= 0 per node set.
std::array<std::vector<double>, 4> sponge_profile(const Grid2D& grid, const BoundaryConfig& b,
                                                  double c_ref);

}  // namespace pfwi
