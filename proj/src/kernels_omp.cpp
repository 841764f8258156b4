#include <cmath>
#include <vector>

#include "pfwi/kernels.hpp"

namespace pfwi::kernels::omp {

namespace {

inline long wrap(long k, long n) { return k < 0 ? k + n : (k >= n ? k - n : k); }

// Edge-safe read of field pointer f at (i, j), i and j at most 2 outside.
inline double at(const double* f, long i, long j, long nx, long nz, bool periodic) {
  if (periodic) return f[wrap(j, nz) * nx + wrap(i, nx)];
  if (i < 0 || j < 0 || i >= nx || j >= nz) return 0.0;
  return f[j * nx + i];
}

}  // namespace

void transport(const KernelView& kv, const double* u, double* z) {
  const long nx = static_cast<long>(kv.grid.nx);
  const long nz = static_cast<long>(kv.grid.nz);
  const std::size_t n = kv.grid.size();
  const double rx = 1.0 / kv.grid.dx;
  const double rz = 1.0 / kv.grid.dz;
  const bool per = kv.periodic;
  const double* v1 = u;
  const double* v3 = u + n;
  const double* q1 = u + 2 * n;
  const double* q3 = u + 3 * n;
  const double* t11 = u + 4 * n;
  const double* t33 = u + 5 * n;
  const double* t13 = u + 6 * n;
  const double* np = u + 7 * n;

#pragma omp parallel for schedule(static)
  for (long j = 0; j < nz; ++j) {
    const bool jin = j >= 2 && j + 2 < nz;
    for (long i = 0; i < nx; ++i) {
      const long p = j * nx + i;
      if (jin && i >= 2 && i + 2 < nx) {
        const long sx = 1, sz = nx;
        auto dp = [&](const double* f, long s) {
          return kC1 * (f[p + s] - f[p]) + kC2 * (f[p + 2 * s] - f[p - s]);
        };
        auto dm = [&](const double* f, long s) {
          return kC1 * (f[p] - f[p - s]) + kC2 * (f[p + s] - f[p - 2 * s]);
        };
        z[p] = rx * dp(t11, sx) + rz * dm(t13, sz);
        z[n + p] = rz * dp(t33, sz) + rx * dm(t13, sx);
        z[2 * n + p] = rx * dp(np, sx);
        z[3 * n + p] = rz * dp(np, sz);
        z[4 * n + p] = rx * dm(v1, sx);
        z[5 * n + p] = rz * dm(v3, sz);
        z[6 * n + p] = rz * dp(v1, sz) + rx * dp(v3, sx);
        z[7 * n + p] = rx * dm(q1, sx) + rz * dm(q3, sz);
      } else {
        auto g = [&](const double* f, long di, long dj) { return at(f, i + di, j + dj, nx, nz, per); };
        auto dpx = [&](const double* f) { return kC1 * (g(f, 1, 0) - g(f, 0, 0)) + kC2 * (g(f, 2, 0) - g(f, -1, 0)); };
        auto dmx = [&](const double* f) { return kC1 * (g(f, 0, 0) - g(f, -1, 0)) + kC2 * (g(f, 1, 0) - g(f, -2, 0)); };
        auto dpz = [&](const double* f) { return kC1 * (g(f, 0, 1) - g(f, 0, 0)) + kC2 * (g(f, 0, 2) - g(f, 0, -1)); };
        auto dmz = [&](const double* f) { return kC1 * (g(f, 0, 0) - g(f, 0, -1)) + kC2 * (g(f, 0, 1) - g(f, 0, -2)); };
        z[p] = rx * dpx(t11) + rz * dmz(t13);
        z[n + p] = rz * dpz(t33) + rx * dmx(t13);
        z[2 * n + p] = rx * dpx(np);
        z[3 * n + p] = rz * dpz(np);
        z[4 * n + p] = rx * dmx(v1);
        z[5 * n + p] = rz * dmz(v3);
        z[6 * n + p] = rz * dpz(v1) + rx * dpx(v3);
        z[7 * n + p] = rx * dmx(q1) + rz * dmz(q3);
      }
    }
  }
}

void inv_mass(const KernelView& kv, double* z) {
  const long n = static_cast<long>(kv.grid.size());
  const auto* ix = kv.idx[set_slot(NodeSet::X)];
  const auto* iz = kv.idx[set_slot(NodeSet::Z)];
  const auto* ic = kv.idx[set_slot(NodeSet::C)];
  const auto* ixz = kv.idx[set_slot(NodeSet::XZ)];
#pragma omp parallel for schedule(static)
  for (long p = 0; p < n; ++p) {
    const double* mx = kv.mvinv_x + 4 * ix[p];
    const double a = z[p], b = z[2 * n + p];
    z[p] = mx[0] * a + mx[1] * b;
    z[2 * n + p] = mx[2] * a + mx[3] * b;

    const double* mz = kv.mvinv_z + 4 * iz[p];
    const double c = z[n + p], d = z[3 * n + p];
    z[n + p] = mz[0] * c + mz[1] * d;
    z[3 * n + p] = mz[2] * c + mz[3] * d;

    const double* e = kv.e3 + 9 * ic[p];
    const double s0 = z[4 * n + p], s1 = z[5 * n + p], s2 = z[7 * n + p];
    z[4 * n + p] = e[0] * s0 + e[1] * s1 + e[2] * s2;
    z[5 * n + p] = e[3] * s0 + e[4] * s1 + e[5] * s2;
    z[7 * n + p] = e[6] * s0 + e[7] * s1 + e[8] * s2;

    z[6 * n + p] *= kv.c55[ixz[p]];
  }
}

namespace {

void local_axis(const KernelView& kv, double* u, bool transpose, int axis) {
  const long n = static_cast<long>(kv.grid.size());
  const std::size_t nk = axis == 0 ? kv.n1 : kv.n3;
  const std::size_t m = 2 + nk;
  const std::size_t slot = set_slot(axis == 0 ? NodeSet::X : NodeSet::Z);
  const auto* idx = kv.idx[slot];
  const double* expo = axis == 0 ? kv.expo_x : kv.expo_z;
  const double* damp = kv.sponge[slot];
  double* fv = u + (axis == 0 ? 0 : 1) * n;
  double* fq = u + (axis == 0 ? 2 : 3) * n;
  double* th = u + (8 + (axis == 0 ? 0 : kv.n1)) * n;

#pragma omp parallel
  {
    constexpr std::size_t kStack = 64;
    double in_s[kStack], out_s[kStack];
    std::vector<double> in_h, out_h;
    double* in = in_s;
    double* out = out_s;
    if (m > kStack) {
      in_h.resize(m);
      out_h.resize(m);
      in = in_h.data();
      out = out_h.data();
    }
#pragma omp for schedule(static)
    for (long p = 0; p < n; ++p) {
      const double* E = expo + m * m * idx[p];
      in[0] = fv[p];
      in[1] = fq[p];
      for (std::size_t k = 0; k < nk; ++k) in[2 + k] = th[k * n + p];
      if (!transpose) {
        for (std::size_t r = 0; r < m; ++r) {
          const double* row = E + r * m;
          double s = 0.0;
          for (std::size_t c = 0; c < m; ++c) s += row[c] * in[c];
          out[r] = s;
        }
      } else {
        for (std::size_t r = 0; r < m; ++r) out[r] = 0.0;
        for (std::size_t c = 0; c < m; ++c) {
          const double* row = E + c * m;
          const double x = in[c];
          for (std::size_t r = 0; r < m; ++r) out[r] += row[r] * x;
        }
      }
      const double d = damp ? damp[p] : 1.0;
      fv[p] = d * out[0];
      fq[p] = d * out[1];
      for (std::size_t k = 0; k < nk; ++k) th[k * n + p] = d * out[2 + k];
    }
  }
}

}  // namespace

void local(const KernelView& kv, double* u, bool transpose) {
  local_axis(kv, u, transpose, 0);
  local_axis(kv, u, transpose, 1);
  const long n = static_cast<long>(kv.grid.size());
  const double* sc = kv.sponge[set_slot(NodeSet::C)];
  const double* sxz = kv.sponge[set_slot(NodeSet::XZ)];
  if (sc) {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) {
      u[4 * n + p] *= sc[p];
      u[5 * n + p] *= sc[p];
      u[7 * n + p] *= sc[p];
    }
  }
  if (sxz) {
#pragma omp parallel for schedule(static)
    for (long p = 0; p < n; ++p) u[6 * n + p] *= sxz[p];
  }
}

void zero_ring(const KernelView& kv, double* u, std::size_t n_fields) {
  const std::size_t nx = kv.grid.nx, nz = kv.grid.nz, n = kv.grid.size();
  for (std::size_t f = 0; f < n_fields; ++f) {
    double* a = u + f * n;
    for (std::size_t i = 0; i < nx; ++i) {
      a[i] = 0.0;
      a[(nz - 1) * nx + i] = 0.0;
    }
    for (std::size_t j = 0; j < nz; ++j) {
      a[j * nx] = 0.0;
      a[j * nx + nx - 1] = 0.0;
    }
  }
}

void axpy(std::size_t n, double h, const double* x, const double* a, double* y) {
  const long nn = static_cast<long>(n);
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nn; ++k) y[k] = a[k] + h * x[k];
}

bool all_finite(const double* u, std::size_t n) {
  const long nn = static_cast<long>(n);
  int bad = 0;
#pragma omp parallel for reduction(| : bad) schedule(static)
  for (long k = 0; k < nn; ++k) bad |= !std::isfinite(u[k]);
  return bad == 0;
}

}  // namespace pfwi::kernels::omp
