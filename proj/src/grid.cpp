#include "pfwi/grid.hpp"

#include <cmath>
#include <string>

#include "pfwi/errors.hpp"

namespace pfwi {

void Grid2D::validate() const {
  if (nx < 8 || nz < 8) throw ValidationError("grid needs nx, nz >= 8");
  if (!(std::isfinite(dx) && std::isfinite(dz) && dx > 0.0 && dz > 0.0))
    throw ValidationError("grid spacing must be positive");
  if (!(std::isfinite(x0) && std::isfinite(z0))) throw ValidationError("grid origin must be finite");
}

Stencil4 bilinear_stencil(const Grid2D& g, NodeSet s, double x, double z, bool periodic,
                          std::size_t margin) {
  const NodeOffset off = node_offset(s);
  const double xi = (x - g.x0) / g.dx - off.x;
  const double zi = (z - g.z0) / g.dz - off.z;
  if (!std::isfinite(xi) || !std::isfinite(zi)) throw OutOfDomain("non-finite position");
  double fi = std::floor(xi);
  double fj = std::floor(zi);
  double tx = xi - fi;
  double tz = zi - fj;
  // snap to an exact node when within rounding
  if (tx > 1.0 - 1e-12) { fi += 1.0; tx = 0.0; }
  if (tz > 1.0 - 1e-12) { fj += 1.0; tz = 0.0; }
  if (tx < 1e-12) tx = 0.0;
  if (tz < 1e-12) tz = 0.0;

  const auto nx = static_cast<long>(g.nx);
  const auto nz = static_cast<long>(g.nz);
  long i0 = static_cast<long>(fi);
  long j0 = static_cast<long>(fj);
  long i1 = i0 + 1;
  long j1 = j0 + 1;
  if (periodic) {
    auto wrap = [](long k, long n) { return ((k % n) + n) % n; };
    i0 = wrap(i0, nx); i1 = wrap(i1, nx);
    j0 = wrap(j0, nz); j1 = wrap(j1, nz);
  } else {
    const long lo = static_cast<long>(margin);
    if (i0 < lo || j0 < lo || i1 > nx - 1 - lo || j1 > nz - 1 - lo)
      throw OutOfDomain("point (" + std::to_string(x) + ", " + std::to_string(z) +
                        ") is outside the usable interior");
  }
  Stencil4 st;
  st.idx = {static_cast<std::size_t>(j0 * nx + i0), static_cast<std::size_t>(j0 * nx + i1),
            static_cast<std::size_t>(j1 * nx + i0), static_cast<std::size_t>(j1 * nx + i1)};
  st.w = {(1.0 - tx) * (1.0 - tz), tx * (1.0 - tz), (1.0 - tx) * tz, tx * tz};
  return st;
}

}  // namespace pfwi
