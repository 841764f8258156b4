#include "pfwi/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pfwi/errors.hpp"
#include "pfwi/operators.hpp"
#include "pfwi/wavefield.hpp"

namespace pfwi {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

void EnergyLedger::append(double t, const EnergyParts& parts) {
  EnergySample s;
  s.t = t;
  s.parts = parts;
  s.Etot = parts.total();
  if (!samples.empty()) {
    const EnergySample& p = samples.back();
    const double rate = (s.Etot - p.Etot) / (t - p.t);
    const double diss = 0.5 * (parts.D + parts.D_sponge + p.parts.D + p.parts.D_sponge);
    s.balance = std::abs(rate + diss);
  }
  samples.push_back(s);
}

namespace {

enum Part { kE1, kE2, kE3, kD, kDs, kParts };

// Per-row sums of every part, then a pairwise reduction over rows.
EnergyParts integrate(const SystemOperators& ops, const double* u) {
  const Grid2D& g = ops.grid;
  const std::size_t N = g.size();
  const std::size_t n1 = ops.n1, n3 = ops.n3;
  std::vector<double> rows(kParts * g.nz, 0.0);
  const auto& kx = ops.kernels.x;
  const auto& kz = ops.kernels.z;
  const std::size_t sX = kernels::set_slot(NodeSet::X), sZ = kernels::set_slot(NodeSet::Z),
                    sC = kernels::set_slot(NodeSet::C), sXZ = kernels::set_slot(NodeSet::XZ);

  const long nz = static_cast<long>(g.nz);
#pragma omp parallel for schedule(static)
  for (long jl = 0; jl < nz; ++jl) {
    const std::size_t j = static_cast<std::size_t>(jl);
    double acc[kParts] = {0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t p = g.index(i, j);
      // one axis: (v, q, Theta) block
      auto axis = [&](std::size_t slot, std::size_t ax, std::size_t fv, std::size_t fq,
                      std::size_t th0, std::size_t nk, const PoleResidueSet& prs) {
        const NodeMatrices& nm = ops.unique[slot][ops.tables[slot].index[p]];
        const double v = u[fv * N + p], q = u[fq * N + p];
        const Eigen::Matrix2d& M = nm.mv[ax];
        const double e1 = 0.5 * (M(0, 0) * v * v + 2.0 * M(0, 1) * v * q + M(1, 1) * q * q);
        double e3 = 0.0, d = nm.darcy[ax] * q * q;
        for (std::size_t k = 0; k < nk; ++k) {
          const double th = u[(th0 + k) * N + p];
          const double r = prs.residues[k], pole = prs.poles[k];
          e3 += 0.5 * nm.mem * r / (-pole) * th * th;
          d += nm.mem * r * (q - th) * (q - th);
        }
        acc[kE1] += e1;
        acc[kE3] += e3;
        acc[kD] += d;
        if (!ops.sponge_rate[slot].empty()) acc[kDs] += 2.0 * ops.sponge_rate[slot][p] * (e1 + e3);
      };
      axis(sX, 0, kV1, kQ1, kThetaBase, n1, kx);
      axis(sZ, 1, kV3, kQ3, kThetaBase + n1, n3, kz);

      {
        const NodeMatrices& nm = ops.unique[sC][ops.tables[sC].index[p]];
        const Eigen::Vector3d s(u[kTau11 * N + p], u[kTau33 * N + p], u[kNegP * N + p]);
        const double e = 0.5 * s.dot(nm.e3_inv * s);
        acc[kE2] += e;
        if (!ops.sponge_rate[sC].empty()) acc[kDs] += 2.0 * ops.sponge_rate[sC][p] * e;
      }
      {
        const NodeMatrices& nm = ops.unique[sXZ][ops.tables[sXZ].index[p]];
        const double t = u[kTau13 * N + p];
        const double e = 0.5 * t * t / nm.c55;
        acc[kE2] += e;
        if (!ops.sponge_rate[sXZ].empty()) acc[kDs] += 2.0 * ops.sponge_rate[sXZ][p] * e;
      }
    }
    for (int k = 0; k < kParts; ++k) rows[k * g.nz + j] = acc[k];
  }

  const double area = g.dx * g.dz;
  EnergyParts out;
  out.E1 = area * pairwise_sum(rows.data() + kE1 * g.nz, g.nz);
  out.E2 = area * pairwise_sum(rows.data() + kE2 * g.nz, g.nz);
  out.E3 = area * pairwise_sum(rows.data() + kE3 * g.nz, g.nz);
  out.D = area * pairwise_sum(rows.data() + kD * g.nz, g.nz);
  out.D_sponge = area * pairwise_sum(rows.data() + kDs * g.nz, g.nz);
  return out;
}

}  // namespace

EnergyParts energy_parts(const SystemOperators& ops, const double* u) { return integrate(ops, u); }
double energy_E1(const SystemOperators& ops, const double* u) { return integrate(ops, u).E1; }
double energy_E2(const SystemOperators& ops, const double* u) { return integrate(ops, u).E2; }
double energy_E3_augmented(const SystemOperators& ops, const double* u) { return integrate(ops, u).E3; }
double dissipation_rate(const SystemOperators& ops, const double* u) { return integrate(ops, u).D; }
double sponge_dissipation(const SystemOperators& ops, const double* u) {
  return integrate(ops, u).D_sponge;
}

DecayReport check_decay(const EnergyLedger& ledger, double rel_tol, double t_start, bool strict) {
  DecayReport rep;
  const EnergySample* prev = nullptr;
  for (const auto& s : ledger.samples) rep.peak_energy = std::max(rep.peak_energy, s.Etot);
  for (const auto& s : ledger.samples) {
    if (s.t < t_start) continue;
    if (!prev) {
      prev = &s;
      continue;
    }
    ++rep.checked;
    rep.worst_balance = std::max(rep.worst_balance, s.balance);
    const double inc = prev->Etot > 0.0 ? (s.Etot - prev->Etot) / prev->Etot : (s.Etot > 0.0 ? 1.0 : 0.0);
    if (inc > rep.worst_increase) rep.worst_increase = inc;
    if (inc > rel_tol) {
      rep.monotone = false;
      if (strict) {
        std::ostringstream msg;
        msg << "energy increased by " << inc << " (relative) between t = " << prev->t
            << " and t = " << s.t;
        throw DecayViolation(msg.str());
      }
    }
    prev = &s;
  }
  return rep;
}

}  // namespace pfwi
