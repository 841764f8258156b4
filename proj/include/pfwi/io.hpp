#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pfwi/energy.hpp"
#include "pfwi/forward.hpp"
#include "pfwi/inversion.hpp"
#include "pfwi/material.hpp"

namespace pfwi {

inline constexpr std::uint32_t kTraceVersion = 1;
inline constexpr std::uint32_t kGridVersion = 1;

/// Provenance written next to every output: format version, grid dims, dt, seed.
struct OutputHeader {
  std::uint32_t version = 1;
  std::size_t nx = 0;
  std::size_t nz = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;

  std::string csv_line() const;  // "# version nx nz dt seed" with values
};

/// "PFWI" little-endian trace file. Throws MagicMismatch, VersionUnsupported,
/// TruncatedFile or IoError.
void write_traces(const std::string& path, const SeismogramSet& s);
SeismogramSet read_traces(const std::string& path);

/// Refuses (ValidationError) rather than resampling when dt differs.
void require_same_sampling(const SeismogramSet& s, double dt, std::size_t n_samples);

/// Named field-major arrays on a grid; the "PFGD" format.
struct GridFile {
  Grid2D grid;
  std::vector<std::string> names;
  std::vector<std::vector<double>> fields;

  const std::vector<double>* find(const std::string& name) const;
};

void write_grid(const std::string& path, const GridFile& g);
GridFile read_grid(const std::string& path);

/// Sidecar "<path>.json" with the output header.
void write_sidecar(const std::string& path, const OutputHeader& h);

GridFile material_to_grid(const MaterialField& mf, const Grid2D& grid);
/// Fields absent from the file keep the value from `base`.
MaterialField material_from_grid(const GridFile& g, const PoroelasticParams& base);

GridFile snapshot_to_grid(const Wavefield& w);
Wavefield snapshot_from_grid(const GridFile& g, std::size_t n1, std::size_t n3);
GridFile gradient_to_grid(const GradientField& g);

void write_energy_csv(const std::string& path, const EnergyLedger& ledger, const OutputHeader& h);
void write_history_csv(const std::string& path, const std::vector<MisfitReport>& hist,
                       const OutputHeader& h);
/// One row per sample: t, then every recorded (receiver, component) column.
void write_traces_csv(const std::string& path, const SeismogramSet& s, const OutputHeader& h,
                      std::size_t n1);

}  // namespace pfwi
