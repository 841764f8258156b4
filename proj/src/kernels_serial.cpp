// Straightforward reference implementation of the grid kernels. Kept simple
// on purpose; the OpenMP versions are checked against it.
#include <cmath>
#include <vector>

#include "pfwi/kernels.hpp"

namespace pfwi::kernels::serial {

namespace {

struct Accessor {
  const KernelView& kv;
  const double* u;

  double operator()(std::size_t f, long i, long j) const {
    const long nx = static_cast<long>(kv.grid.nx);
    const long nz = static_cast<long>(kv.grid.nz);
    if (kv.periodic) {
      i = ((i % nx) + nx) % nx;
      j = ((j % nz) + nz) % nz;
    } else if (i < 0 || j < 0 || i >= nx || j >= nz) {
      return 0.0;
    }
    return u[f * kv.grid.size() + static_cast<std::size_t>(j * nx + i)];
  }
};

// forward difference: from integer nodes to the half node i+1/2
double dplus(const Accessor& a, std::size_t f, long i, long j, bool along_x) {
  auto g = [&](long k) { return along_x ? a(f, i + k, j) : a(f, i, j + k); };
  return kC1 * (g(1) - g(0)) + kC2 * (g(2) - g(-1));
}

// backward difference: from half nodes k+1/2 to the integer node i
double dminus(const Accessor& a, std::size_t f, long i, long j, bool along_x) {
  auto g = [&](long k) { return along_x ? a(f, i + k, j) : a(f, i, j + k); };
  return kC1 * (g(0) - g(-1)) + kC2 * (g(1) - g(-2));
}

}  // namespace

void transport(const KernelView& kv, const double* u, double* z) {
  const Accessor a{kv, u};
  const std::size_t n = kv.grid.size();
  const double rx = 1.0 / kv.grid.dx;
  const double rz = 1.0 / kv.grid.dz;
  for (std::size_t jj = 0; jj < kv.grid.nz; ++jj) {
    for (std::size_t ii = 0; ii < kv.grid.nx; ++ii) {
      const long i = static_cast<long>(ii);
      const long j = static_cast<long>(jj);
      const std::size_t p = kv.grid.index(ii, jj);
      z[0 * n + p] = rx * dplus(a, 4, i, j, true) + rz * dminus(a, 6, i, j, false);   // v1
      z[1 * n + p] = rz * dplus(a, 5, i, j, false) + rx * dminus(a, 6, i, j, true);   // v3
      z[2 * n + p] = rx * dplus(a, 7, i, j, true);                                     // q1
      z[3 * n + p] = rz * dplus(a, 7, i, j, false);                                    // q3
      z[4 * n + p] = rx * dminus(a, 0, i, j, true);                                    // tau11
      z[5 * n + p] = rz * dminus(a, 1, i, j, false);                                   // tau33
      z[6 * n + p] = rz * dplus(a, 0, i, j, false) + rx * dplus(a, 1, i, j, true);     // tau13
      z[7 * n + p] = rx * dminus(a, 2, i, j, true) + rz * dminus(a, 3, i, j, false);   // -p
    }
  }
}

void inv_mass(const KernelView& kv, double* z) {
  const std::size_t n = kv.grid.size();
  for (std::size_t p = 0; p < n; ++p) {
    const double* mx = kv.mvinv_x + 4 * kv.idx[set_slot(NodeSet::X)][p];
    const double a = z[0 * n + p], b = z[2 * n + p];
    z[0 * n + p] = mx[0] * a + mx[1] * b;
    z[2 * n + p] = mx[2] * a + mx[3] * b;

    const double* mz = kv.mvinv_z + 4 * kv.idx[set_slot(NodeSet::Z)][p];
    const double c = z[1 * n + p], d = z[3 * n + p];
    z[1 * n + p] = mz[0] * c + mz[1] * d;
    z[3 * n + p] = mz[2] * c + mz[3] * d;

    const double* e = kv.e3 + 9 * kv.idx[set_slot(NodeSet::C)][p];
    const double s0 = z[4 * n + p], s1 = z[5 * n + p], s2 = z[7 * n + p];
    z[4 * n + p] = e[0] * s0 + e[1] * s1 + e[2] * s2;
    z[5 * n + p] = e[3] * s0 + e[4] * s1 + e[5] * s2;
    z[7 * n + p] = e[6] * s0 + e[7] * s1 + e[8] * s2;

    z[6 * n + p] *= kv.c55[kv.idx[set_slot(NodeSet::XZ)][p]];
  }
}

void local(const KernelView& kv, double* u, bool transpose) {
  const std::size_t n = kv.grid.size();
  for (int axis = 0; axis < 2; ++axis) {
    const std::size_t nk = axis == 0 ? kv.n1 : kv.n3;
    const std::size_t m = 2 + nk;
    const std::size_t slot = set_slot(axis == 0 ? NodeSet::X : NodeSet::Z);
    const double* expo = axis == 0 ? kv.expo_x : kv.expo_z;
    std::vector<std::size_t> fields{axis == 0 ? std::size_t{0} : std::size_t{1},
                                    axis == 0 ? std::size_t{2} : std::size_t{3}};
    for (std::size_t k = 0; k < nk; ++k) fields.push_back(8 + (axis == 0 ? 0 : kv.n1) + k);
    std::vector<double> in(m), out(m);
    for (std::size_t p = 0; p < n; ++p) {
      const double* E = expo + m * m * kv.idx[slot][p];
      for (std::size_t r = 0; r < m; ++r) in[r] = u[fields[r] * n + p];
      for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c) s += (transpose ? E[c * m + r] : E[r * m + c]) * in[c];
        out[r] = s;
      }
      const double damp = kv.sponge[slot] ? kv.sponge[slot][p] : 1.0;
      for (std::size_t r = 0; r < m; ++r) u[fields[r] * n + p] = damp * out[r];
    }
  }
  const double* sc = kv.sponge[set_slot(NodeSet::C)];
  const double* sxz = kv.sponge[set_slot(NodeSet::XZ)];
  for (std::size_t p = 0; p < n; ++p) {
    if (sc) {
      u[4 * n + p] *= sc[p];
      u[5 * n + p] *= sc[p];
      u[7 * n + p] *= sc[p];
    }
    if (sxz) u[6 * n + p] *= sxz[p];
  }
}

void zero_ring(const KernelView& kv, double* u, std::size_t n_fields) {
  const std::size_t nx = kv.grid.nx, nz = kv.grid.nz, n = kv.grid.size();
  for (std::size_t f = 0; f < n_fields; ++f)
    for (std::size_t j = 0; j < nz; ++j)
      for (std::size_t i = 0; i < nx; ++i)
        if (i == 0 || j == 0 || i == nx - 1 || j == nz - 1) u[f * n + j * nx + i] = 0.0;
}

void axpy(std::size_t n, double h, const double* x, const double* a, double* y) {
  for (std::size_t k = 0; k < n; ++k) y[k] = a[k] + h * x[k];
}

bool all_finite(const double* u, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k)
    if (!std::isfinite(u[k])) return false;
  return true;
}

}  // namespace pfwi::kernels::serial
