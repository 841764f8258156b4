#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "pfwi/grid.hpp"

namespace pfwi::kernels {

/// Flat, non-owning view of everything the grid kernels touch. Coefficient
/// arrays are indexed through the per-node unique-material tables.
struct KernelView {
  Grid2D grid;
  bool periodic = false;
  std::size_t n1 = 0;
  std::size_t n3 = 0;
  // unique-material index per node for C, X, Z, XZ
  std::array<const std::uint32_t*, 4> idx{};
  const double* mvinv_x = nullptr;  // 2x2 row-major per unique X material
  const double* mvinv_z = nullptr;  // 2x2 per unique Z material
  const double* e3 = nullptr;       // 3x3 per unique C material (tau11, tau33, -p)
  const double* c55 = nullptr;      // 1 per unique XZ material
  const double* expo_x = nullptr;   // (2+n1)^2 per unique X material
  const double* expo_z = nullptr;   // (2+n3)^2 per unique Z material
  // per-node damping factor exp(-s dt/2); nullptr means none
  std::array<const double*, 4> sponge{};

  std::size_t n_fields() const { return 8 + n1 + n3; }
};

constexpr std::size_t set_slot(NodeSet s) { return static_cast<std::size_t>(s); }

#define PFWI_KERNEL_DECLS                                                        \
  /* z[0..8) = B1 u[0..8): staggered 4th-order differences */                    \
  void transport(const KernelView& kv, const double* u, double* z);              \
  /* z[0..8) <- N1^{-1} z[0..8) node by node */                                  \
  void inv_mass(const KernelView& kv, double* z);                                \
  /* exact local half step (and sponge) on every field; transpose if asked */    \
  void local(const KernelView& kv, double* u, bool transpose);                   \
  /* zero every field on the outermost node ring */                              \
  void zero_ring(const KernelView& kv, double* u, std::size_t n_fields);         \
  /* y = a + h x over n entries */                                               \
  void axpy(std::size_t n, double h, const double* x, const double* a, double* y); \
  bool all_finite(const double* u, std::size_t n);

namespace serial {
PFWI_KERNEL_DECLS
}
namespace omp {
PFWI_KERNEL_DECLS
}

#undef PFWI_KERNEL_DECLS

/// 9/8 and -1/24: fourth-order staggered first-derivative weights.
inline constexpr double kC1 = 9.0 / 8.0;
inline constexpr double kC2 = -1.0 / 24.0;

}  // namespace pfwi::kernels
