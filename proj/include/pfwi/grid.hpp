#pragma once

#include <array>
#include <cstddef>

namespace pfwi {

/// Staggered positions of the four node sets relative to cell (i, j):
/// C (i, j), X (i+1/2, j), Z (i, j+1/2), XZ (i+1/2, j+1/2).
enum class NodeSet { C, X, Z, XZ };

struct NodeOffset {
  double x;
  double z;
};

constexpr NodeOffset node_offset(NodeSet s) {
  switch (s) {
    case NodeSet::C: return {0.0, 0.0};
    case NodeSet::X: return {0.5, 0.0};
    case NodeSet::Z: return {0.0, 0.5};
    case NodeSet::XZ: return {0.5, 0.5};
  }
  return {0.0, 0.0};
}

/// Uniform grid; cell (i, j) is centred at (x0 + i dx, z0 + j dz).
struct Grid2D {
  std::size_t nx = 0;
  std::size_t nz = 0;
  double dx = 0.0;
  double dz = 0.0;
  double x0 = 0.0;
  double z0 = 0.0;

  std::size_t size() const { return nx * nz; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  double x_at(NodeSet s, std::size_t i) const { return x0 + (static_cast<double>(i) + node_offset(s).x) * dx; }
  double z_at(NodeSet s, std::size_t j) const { return z0 + (static_cast<double>(j) + node_offset(s).z) * dz; }

  /// Throws ValidationError unless nx, nz >= 8 and dx, dz > 0.
  void validate() const;
  bool operator==(const Grid2D&) const = default;
};

/// Four nodes and tent weights around a point; weights sum to one.
struct Stencil4 {
  std::array<std::size_t, 4> idx{};
  std::array<double, 4> w{};
};

/// Bilinear weights of (x, z) on the given node set. Throws OutOfDomain when
/// the four nodes are not all inside [margin, n-1-margin] (non-periodic).
Stencil4 bilinear_stencil(const Grid2D& g, NodeSet s, double x, double z, bool periodic,
                          std::size_t margin = 0);

}  // namespace pfwi
