#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pfwi/forward.hpp"
#include "pfwi/inversion.hpp"
#include "pfwi/kernel_fit.hpp"

namespace pfwi {

struct KernelSettings {
  bool enabled = true;       // false: empty pole sets (no memory terms)
  FrequencyGrid frequencies;  // used when fitting
  std::string file;           // load a fitted kernel file instead of fitting
};

struct ReceiverSetting {
  double x = 0.0;
  double z = 0.0;
  std::vector<std::size_t> components{kV1, kV3};
};

struct InversionSettings {
  ParameterSelection selection;
  InversionOptions options;
  std::vector<std::string> observed;  // one trace file per shot
  std::string truth_file;             // grid file used to synthesize data
  std::size_t n_probes = 5;
  double fd_step = 1e-4;
  std::size_t region_i0 = 0, region_i1 = 0, region_j0 = 0, region_j1 = 0;
  bool has_region = false;
};

struct RunConfig {
  std::string source_path;
  std::uint64_t seed = 0;
  std::string output_dir = ".";
  unsigned precision_bits = kDefaultPrecisionBits;
  int threads = 0;

  PoroelasticParams material;
  std::string material_file;
  Grid2D grid;
  SimConfig sim;
  KernelSettings kernel;
  std::vector<SourceSpec> sources;
  std::vector<std::size_t> source_shot;  // shot index per source
  std::vector<ReceiverSetting> receivers;
  InversionSettings inversion;
  bool has_inversion = false;

  /// Sources grouped by shot index.
  std::vector<std::vector<SourceSpec>> shots() const;
  /// Receiver specs with masks sized for n_components.
  std::vector<ReceiverSpec> receiver_specs(std::size_t n_components) const;
  /// Effective configuration in the input syntax.
  std::string echo() const;
};

/// ParseError (with line and key) for syntax, unknown keys or bad values;
/// ValidationError listing every violated invariant after parsing.
RunConfig parse_config(std::string_view text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

/// Command-specific requirements (e.g. invert needs observed traces).
void require_for_command(const RunConfig& cfg, std::string_view command);

MaterialField build_material(const RunConfig& cfg);
/// Fits (or loads) the per-axis kernels from the configured base material.
KernelPair build_kernels(const RunConfig& cfg);

}  // namespace pfwi
