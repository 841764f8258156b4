#include "pfwi/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "pfwi/errors.hpp"
#include "pfwi/io.hpp"

namespace pfwi {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string name;
  std::size_t line = 0;
  std::map<std::string, Entry> keys;
};

[[noreturn]] void fail(std::size_t line, const std::string& key, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + (key.empty() ? "" : ", key '" + key + "'") + ": " + msg);
}

// Typed access that records which keys were consumed.
class Reader {
 public:
  explicit Reader(const Section& s) : s_(s) {}

  bool has(const std::string& k) const { return s_.keys.count(k) != 0; }

  double num(const std::string& k, double def) {
    if (!has(k)) return def;
    const Entry& e = take(k);
    double v = 0.0;
    const char* b = e.value.data();
    const auto r = std::from_chars(b, b + e.value.size(), v);
    if (r.ec != std::errc() || r.ptr != b + e.value.size() || !std::isfinite(v))
      fail(e.line, k, "expected a finite number, got '" + e.value + "'");
    return v;
  }
  std::uint64_t uint(const std::string& k, std::uint64_t def) {
    if (!has(k)) return def;
    const Entry& e = take(k);
    std::uint64_t v = 0;
    const char* b = e.value.data();
    const auto r = std::from_chars(b, b + e.value.size(), v);
    if (r.ec != std::errc() || r.ptr != b + e.value.size())
      fail(e.line, k, "expected a non-negative integer, got '" + e.value + "'");
    return v;
  }
  std::string str(const std::string& k, const std::string& def) {
    if (!has(k)) return def;
    return take(k).value;
  }
  std::string choice(const std::string& k, const std::string& def, std::initializer_list<const char*> opts) {
    if (!has(k)) return def;
    const Entry& e = take(k);
    for (const char* o : opts)
      if (e.value == o) return e.value;
    std::string list;
    for (const char* o : opts) list += std::string(list.empty() ? "" : ", ") + o;
    fail(e.line, k, "expected one of {" + list + "}, got '" + e.value + "'");
  }
  bool flag(const std::string& k, bool def) {
    return choice(k, def ? "true" : "false", {"true", "false"}) == "true";
  }
  std::size_t line_of(const std::string& k) const { return s_.keys.at(k).line; }

  void finish() const {
    for (const auto& [k, e] : s_.keys)
      if (!used_.count(k)) fail(e.line, k, "unknown key in [" + s_.name + "]");
  }

 private:
  const Entry& take(const std::string& k) {
    used_[k] = true;
    return s_.keys.at(k);
  }
  const Section& s_;
  std::map<std::string, bool> used_;
};

std::vector<Section> tokenize(std::string_view text) {
  std::vector<Section> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "", "unterminated section header");
      out.push_back({trim(std::string_view(line).substr(1, line.size() - 2)), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "", "expected 'key = value'");
    if (out.empty()) fail(line_no, "", "key outside any section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string val = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail(line_no, "", "empty key");
    if (out.back().keys.count(key)) fail(line_no, key, "duplicate key");
    out.back().keys[key] = {val, line_no};
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::size_t component_from_name(const std::string& n, std::size_t line) {
  static const char* names[] = {"v1", "v3", "q1", "q3", "tau11", "tau33", "tau13", "neg_p"};
  for (std::size_t i = 0; i < 8; ++i)
    if (n == names[i]) return i;
  fail(line, "components", "unknown component '" + n + "'");
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  if (path.is_absolute()) return p;
  return (std::filesystem::path(base) / path).lexically_normal().string();
}

void read_material(Reader& r, PoroelasticParams& m, std::string& file, const std::string& base) {
  file = resolve(base, r.str("field_file", ""));
  for (ParamId id : all_params()) {
    const std::string k(param_name(id));
    set_param(m, id, r.num(k, get_param(m, id)));
  }
  r.finish();
}

}  // namespace

std::vector<std::vector<SourceSpec>> RunConfig::shots() const {
  std::size_t n = 0;
  for (std::size_t s : source_shot) n = std::max(n, s + 1);
  std::vector<std::vector<SourceSpec>> out(n);
  for (std::size_t i = 0; i < sources.size(); ++i) out[source_shot[i]].push_back(sources[i]);
  return out;
}

std::vector<ReceiverSpec> RunConfig::receiver_specs(std::size_t n_components) const {
  std::vector<ReceiverSpec> out;
  for (const auto& r : receivers) {
    ReceiverSpec s;
    s.x = r.x;
    s.z = r.z;
    s.mask.assign(n_components, 0);
    for (std::size_t c : r.components) s.mask[c] = 1;
    out.push_back(std::move(s));
  }
  return out;
}

RunConfig parse_config(std::string_view text, const std::string& base_dir) {
  RunConfig cfg;
  cfg.material.phi = 0.2;
  cfg.material.rho_s = 2500.0;
  cfg.material.rho_f = 1000.0;
  cfg.material.eta = 1e-3;
  cfg.material.K_s = 40e9;
  cfg.material.K_f = 2.5e9;
  cfg.material.kappa = {1e-12, 1e-12};
  cfg.material.alpha_inf = {2.0, 2.0};
  cfg.material.stiffness = {16e9, 4e9, 4e9, 16e9, 6e9};
  cfg.grid = {100, 100, 5.0, 5.0, 0.0, 0.0};

  bool have[8] = {};
  double f_min_hz = 0.0, f_max_hz = 0.0;
  std::size_t receiver_line = 0;
  for (const Section& s : tokenize(text)) {
    Reader r(s);
    auto once = [&](int slot) {
      if (have[slot]) fail(s.line, "", "section [" + s.name + "] given twice");
      have[slot] = true;
    };
    if (s.name == "run") {
      once(0);
      cfg.seed = r.uint("seed", 0);
      cfg.output_dir = resolve(base_dir, r.str("output", "."));
      cfg.precision_bits = static_cast<unsigned>(r.uint("precision_bits", kDefaultPrecisionBits));
      cfg.threads = static_cast<int>(r.uint("threads", 0));
      r.finish();
    } else if (s.name == "material") {
      once(1);
      read_material(r, cfg.material, cfg.material_file, base_dir);
    } else if (s.name == "grid") {
      once(2);
      cfg.grid.nx = r.uint("nx", cfg.grid.nx);
      cfg.grid.nz = r.uint("nz", cfg.grid.nz);
      cfg.grid.dx = r.num("dx", cfg.grid.dx);
      cfg.grid.dz = r.num("dz", cfg.grid.dz);
      cfg.grid.x0 = r.num("x0", 0.0);
      cfg.grid.z0 = r.num("z0", 0.0);
      r.finish();
    } else if (s.name == "time") {
      once(3);
      cfg.sim.t_final = r.num("t_final", 0.0);
      cfg.sim.dt = r.num("dt", 0.0);
      cfg.sim.cfl_safety = r.num("cfl_safety", cfg.sim.cfl_safety);
      cfg.sim.snapshot_every = r.uint("snapshot_every", 0);
      cfg.sim.energy_every = r.uint("energy_every", 0);
      cfg.sim.checkpoint_every = r.uint("checkpoint_every", 0);
      cfg.sim.backend = r.choice("backend", "omp", {"omp", "serial"}) == "omp" ? Backend::omp : Backend::serial;
      r.finish();
    } else if (s.name == "boundary") {
      once(4);
      cfg.sim.boundary.kind = r.choice("kind", "sponge", {"sponge", "periodic"}) == "periodic"
                                  ? BoundaryConfig::Kind::periodic
                                  : BoundaryConfig::Kind::sponge;
      cfg.sim.boundary.width = r.uint("width", cfg.sim.boundary.width);
      cfg.sim.boundary.strength = r.num("strength", cfg.sim.boundary.strength);
      r.finish();
    } else if (s.name == "kernel") {
      once(5);
      cfg.kernel.enabled = r.flag("enabled", true);
      cfg.kernel.file = resolve(base_dir, r.str("file", ""));
      cfg.kernel.frequencies.count = r.uint("count", 20);
      cfg.kernel.frequencies.spacing =
          r.choice("spacing", "log", {"log", "linear"}) == "log" ? Spacing::log : Spacing::linear;
      f_min_hz = r.num("f_min", 0.0);
      f_max_hz = r.num("f_max", 0.0);
      r.finish();
    } else if (s.name == "source") {
      SourceSpec src;
      src.x = r.num("x", 0.0);
      src.z = r.num("z", 0.0);
      src.wavelet.f0 = r.num("f0", 10.0);
      src.wavelet.t0 = r.num("t0", 2.0 / src.wavelet.f0);
      if (src.wavelet.t0 < 0.0) fail(s.line, "t0", "must be >= 0");
      src.wavelet.amplitude = r.num("amplitude", 1.0);
      src.channel = r.choice("channel", "force", {"force", "stress"}) == "force" ? SourceChannel::force
                                                                                : SourceChannel::stress;
      src.c1 = r.num("c1", src.channel == SourceChannel::force ? 0.0 : 1.0);
      src.c2 = r.num("c2", 1.0);
      cfg.source_shot.push_back(r.uint("shot", 0));
      cfg.sources.push_back(src);
      r.finish();
    } else if (s.name == "receivers") {
      receiver_line = s.line;
      std::vector<std::size_t> comps;
      const std::string cl = r.str("components", "v1,v3");
      for (const auto& n : split_list(cl)) comps.push_back(component_from_name(n, s.line));
      if (comps.empty()) fail(s.line, "components", "no components listed");
      const double x0 = r.num("x", 0.0), z0 = r.num("z", 0.0);
      const double x1 = r.num("x_end", x0), z1 = r.num("z_end", z0);
      const std::size_t count = r.uint("count", 1);
      if (count == 0) fail(s.line, "count", "must be at least 1");
      for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        cfg.receivers.push_back({x0 + t * (x1 - x0), z0 + t * (z1 - z0), comps});
      }
      r.finish();
    } else if (s.name == "inversion") {
      once(6);
      cfg.has_inversion = true;
      auto& inv = cfg.inversion;
      for (const auto& n : split_list(r.str("params", "kappa_1"))) {
        const auto id = param_from_name(n);
        if (!id) fail(s.line, "params", "unknown parameter '" + n + "'");
        const double v = get_param(cfg.material, *id);
        ParameterBound b;
        b.id = *id;
        b.scale = r.num("scale_" + n, v != 0.0 ? std::abs(v) : 1.0);
        b.lower = r.num("lower_" + n, v > 0.0 ? 0.1 * v : v - 1.0);
        b.upper = r.num("upper_" + n, v > 0.0 ? 10.0 * v : v + 1.0);
        inv.selection.params.push_back(b);
      }
      for (const auto& p : split_list(r.str("observed", ""))) inv.observed.push_back(resolve(base_dir, p));
      inv.truth_file = resolve(base_dir, r.str("truth_file", ""));
      inv.options.max_iterations = r.uint("max_iterations", inv.options.max_iterations);
      inv.options.grad_tol = r.num("grad_tol", inv.options.grad_tol);
      inv.options.armijo_c1 = r.num("armijo_c1", inv.options.armijo_c1);
      inv.options.initial_step = r.num("initial_step", inv.options.initial_step);
      inv.options.max_backtracks = r.uint("max_backtracks", inv.options.max_backtracks);
      inv.n_probes = r.uint("n_probes", inv.n_probes);
      inv.fd_step = r.num("fd_step", inv.fd_step);
      if (r.has("region")) {
        const std::size_t ln = r.line_of("region");
        const auto parts = split_list(r.str("region", ""));
        if (parts.size() != 4) fail(ln, "region", "expected 'i0 i1 j0 j1'");
        std::size_t v[4];
        for (int q = 0; q < 4; ++q) {
          const auto res = std::from_chars(parts[q].data(), parts[q].data() + parts[q].size(), v[q]);
          if (res.ec != std::errc() || res.ptr != parts[q].data() + parts[q].size())
            fail(ln, "region", "expected integers");
        }
        inv.region_i0 = v[0];
        inv.region_i1 = v[1];
        inv.region_j0 = v[2];
        inv.region_j1 = v[3];
        inv.has_region = true;
      }
      r.finish();
    } else {
      fail(s.line, "", "unknown section [" + s.name + "]");
    }
  }
  (void)receiver_line;

  // validation: collect every problem
  std::vector<std::string> bad;
  for (const auto& m : validate(cfg.material)) bad.push_back("material: " + m);
  if (cfg.grid.nx < 8 || cfg.grid.nz < 8) bad.push_back("grid: nx and nz must be at least 8");
  if (!(cfg.grid.dx > 0.0) || !(cfg.grid.dz > 0.0)) bad.push_back("grid: dx and dz must be positive");
  if (!(cfg.sim.t_final > 0.0)) bad.push_back("time: t_final must be positive");
  if (cfg.sim.dt < 0.0) bad.push_back("time: dt must be >= 0");
  if (!(cfg.sim.cfl_safety > 0.0 && cfg.sim.cfl_safety <= 1.0)) bad.push_back("time: cfl_safety must lie in (0, 1]");
  if (!cfg.sim.boundary.periodic()) {
    if (2 * cfg.sim.boundary.width + 2 >= std::min(cfg.grid.nx, cfg.grid.nz))
      bad.push_back("boundary: sponge width leaves no interior");
    if (cfg.sim.boundary.strength < 0.0) bad.push_back("boundary: strength must be >= 0");
  }
  if (cfg.precision_bits < 64) bad.push_back("run: precision_bits must be at least 64");
  for (const auto& s : cfg.sources) {
    if (!(s.wavelet.f0 > 0.0)) bad.push_back("source: f0 must be positive");
    if (s.c1 == 0.0 && s.c2 == 0.0) bad.push_back("source: c1 and c2 are both zero");
  }
  {
    std::vector<bool> used;
    for (std::size_t sh : cfg.source_shot) {
      if (used.size() <= sh) used.resize(sh + 1, false);
      used[sh] = true;
    }
    for (std::size_t i = 0; i < used.size(); ++i)
      if (!used[i]) bad.push_back("source: shot " + std::to_string(i) + " has no sources");
  }
  if (cfg.kernel.enabled && cfg.kernel.file.empty()) {
    double f0 = 0.0;
    for (const auto& s : cfg.sources) f0 = std::max(f0, s.wavelet.f0);
    if (f_min_hz <= 0.0 && f_max_hz <= 0.0 && f0 > 0.0) {
      cfg.kernel.frequencies = FrequencyGrid::around_source(f0, cfg.kernel.frequencies.count);
    } else {
      cfg.kernel.frequencies.omega_min = 2.0 * M_PI * f_min_hz;
      cfg.kernel.frequencies.omega_max = 2.0 * M_PI * f_max_hz;
    }
    if (cfg.kernel.frequencies.count == 0) bad.push_back("kernel: count must be positive");
    if (!(cfg.kernel.frequencies.omega_min > 0.0) ||
        !(cfg.kernel.frequencies.omega_max > cfg.kernel.frequencies.omega_min))
      bad.push_back("kernel: need 0 < f_min < f_max (or a source to centre the band on)");
  }
  if (cfg.has_inversion) {
    auto& inv = cfg.inversion;
    if (inv.has_region) {
      if (inv.region_i0 > inv.region_i1 || inv.region_i1 >= cfg.grid.nx || inv.region_j0 > inv.region_j1 ||
          inv.region_j1 >= cfg.grid.nz)
        bad.push_back("inversion: region outside the grid or empty");
      else {
        inv.selection.region.assign(cfg.grid.size(), 0);
        for (std::size_t j = inv.region_j0; j <= inv.region_j1; ++j)
          for (std::size_t i = inv.region_i0; i <= inv.region_i1; ++i) inv.selection.region[cfg.grid.index(i, j)] = 1;
      }
    }
    try {
      inv.selection.validate(cfg.grid.size());
    } catch (const ValidationError& e) {
      bad.push_back(std::string("inversion: ") + e.what());
    }
    if (!(inv.fd_step > 0.0)) bad.push_back("inversion: fd_step must be positive");
    if (!(inv.options.initial_step > 0.0)) bad.push_back("inversion: initial_step must be positive");
  }
  if (!bad.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ValidationError(msg);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string dir = std::filesystem::path(path).parent_path().string();
  RunConfig cfg = parse_config(ss.str(), dir.empty() ? "." : dir);
  cfg.source_path = path;
  auto must_exist = [](const std::string& p, const char* what) {
    if (!p.empty() && !std::filesystem::exists(p))
      throw ValidationError(std::string(what) + " not found: " + p);
  };
  must_exist(cfg.material_file, "material field file");
  must_exist(cfg.kernel.file, "kernel file");
  must_exist(cfg.inversion.truth_file, "truth model file");
  for (const auto& p : cfg.inversion.observed) must_exist(p, "observed traces");
  return cfg;
}

void require_for_command(const RunConfig& cfg, std::string_view command) {
  std::vector<std::string> bad;
  const bool needs_sources = command == "simulate" || command == "energy-report" ||
                             command == "adjoint-test" || command == "gradient-check" || command == "invert";
  if (needs_sources && cfg.sources.empty()) bad.push_back("at least one [source] is required");
  if ((command == "adjoint-test" || command == "gradient-check" || command == "invert") && cfg.receivers.empty())
    bad.push_back("at least one [receivers] block is required");
  if (command == "gradient-check" || command == "invert") {
    if (!cfg.has_inversion) bad.push_back("an [inversion] section is required");
    const std::size_t n_shots = cfg.shots().size();
    if (command == "invert" && cfg.inversion.observed.empty())
      bad.push_back("inversion: observed trace paths are required for invert");
    if (command == "gradient-check" && cfg.inversion.observed.empty() && cfg.inversion.truth_file.empty())
      bad.push_back("inversion: gradient-check needs observed traces or a truth_file");
    if (!cfg.inversion.observed.empty() && cfg.inversion.observed.size() != n_shots)
      bad.push_back("inversion: " + std::to_string(cfg.inversion.observed.size()) + " observed files for " +
                    std::to_string(n_shots) + " shots");
  }
  if (!bad.empty()) {
    std::string msg = std::string(command) + ":";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ValidationError(msg);
  }
}

MaterialField build_material(const RunConfig& cfg) {
  if (cfg.material_file.empty()) return MaterialField(cfg.grid.nx, cfg.grid.nz, cfg.material);
  const GridFile g = read_grid(cfg.material_file);
  if (g.grid.nx != cfg.grid.nx || g.grid.nz != cfg.grid.nz)
    throw GeometryMismatch("material file is " + std::to_string(g.grid.nx) + "x" + std::to_string(g.grid.nz) +
                           " but the grid is " + std::to_string(cfg.grid.nx) + "x" + std::to_string(cfg.grid.nz));
  return material_from_grid(g, cfg.material);
}

KernelPair build_kernels(const RunConfig& cfg) {
  if (!cfg.kernel.enabled) return KernelPair::empty(cfg.material);
  if (!cfg.kernel.file.empty()) {
    const auto sets = read_kernel_file(cfg.kernel.file);
    KernelPair k = KernelPair::empty(cfg.material);
    bool got[2] = {false, false};
    for (const auto& s : sets) {
      const std::size_t j = axis_index(s.axis);
      (j == 0 ? k.x : k.z) = s;
      got[j] = true;
    }
    if (!got[0] || !got[1]) throw ParseError("kernel file must contain both axes");
    return k;
  }
  return {fit_kernel(cfg.material, cfg.kernel.frequencies, Axis::x, cfg.precision_bits).set,
          fit_kernel(cfg.material, cfg.kernel.frequencies, Axis::z, cfg.precision_bits).set};
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "[run]\nseed = " << seed << "\noutput = " << output_dir << "\nprecision_bits = " << precision_bits
     << "\nthreads = " << threads << "\n\n[material]\n";
  if (!material_file.empty()) os << "field_file = " << material_file << '\n';
  for (ParamId id : all_params()) os << param_name(id) << " = " << get_param(material, id) << '\n';
  os << "\n[grid]\nnx = " << grid.nx << "\nnz = " << grid.nz << "\ndx = " << grid.dx << "\ndz = " << grid.dz
     << "\nx0 = " << grid.x0 << "\nz0 = " << grid.z0 << "\n\n[time]\nt_final = " << sim.t_final
     << "\ndt = " << sim.dt << "\ncfl_safety = " << sim.cfl_safety << "\nsnapshot_every = " << sim.snapshot_every
     << "\nenergy_every = " << sim.energy_every << "\ncheckpoint_every = " << sim.checkpoint_every
     << "\nbackend = " << (sim.backend == Backend::omp ? "omp" : "serial") << "\n\n[boundary]\nkind = "
     << (sim.boundary.periodic() ? "periodic" : "sponge") << "\nwidth = " << sim.boundary.width
     << "\nstrength = " << sim.boundary.strength << "\n\n[kernel]\nenabled = " << (kernel.enabled ? "true" : "false")
     << '\n';
  if (!kernel.file.empty()) os << "file = " << kernel.file << '\n';
  os << "count = " << kernel.frequencies.count << "\nspacing = "
     << (kernel.frequencies.spacing == Spacing::log ? "log" : "linear")
     << "\nf_min = " << kernel.frequencies.omega_min / (2.0 * M_PI)
     << "\nf_max = " << kernel.frequencies.omega_max / (2.0 * M_PI) << '\n';
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    os << "\n[source]\nshot = " << source_shot[i] << "\nx = " << s.x << "\nz = " << s.z << "\nf0 = " << s.wavelet.f0
       << "\nt0 = " << s.wavelet.t0 << "\namplitude = " << s.wavelet.amplitude
       << "\nchannel = " << (s.channel == SourceChannel::force ? "force" : "stress") << "\nc1 = " << s.c1
       << "\nc2 = " << s.c2 << '\n';
  }
  for (const auto& r : receivers) {
    os << "\n[receivers]\nx = " << r.x << "\nz = " << r.z << "\ncomponents = ";
    for (std::size_t q = 0; q < r.components.size(); ++q) os << (q ? "," : "") << field_name(r.components[q], 0);
    os << '\n';
  }
  if (has_inversion) {
    const auto& inv = inversion;
    os << "\n[inversion]\nparams = ";
    for (std::size_t q = 0; q < inv.selection.params.size(); ++q)
      os << (q ? "," : "") << param_name(inv.selection.params[q].id);
    os << '\n';
    for (const auto& b : inv.selection.params) {
      const std::string n(param_name(b.id));
      os << "lower_" << n << " = " << b.lower << "\nupper_" << n << " = " << b.upper << "\nscale_" << n << " = "
         << b.scale << '\n';
    }
    if (inv.has_region)
      os << "region = " << inv.region_i0 << ' ' << inv.region_i1 << ' ' << inv.region_j0 << ' ' << inv.region_j1
         << '\n';
    if (!inv.observed.empty()) {
      os << "observed = ";
      for (std::size_t q = 0; q < inv.observed.size(); ++q) os << (q ? "," : "") << inv.observed[q];
      os << '\n';
    }
    if (!inv.truth_file.empty()) os << "truth_file = " << inv.truth_file << '\n';
    os << "max_iterations = " << inv.options.max_iterations << "\ngrad_tol = " << inv.options.grad_tol
       << "\narmijo_c1 = " << inv.options.armijo_c1 << "\ninitial_step = " << inv.options.initial_step
       << "\nmax_backtracks = " << inv.options.max_backtracks << "\nn_probes = " << inv.n_probes
       << "\nfd_step = " << inv.fd_step << '\n';
  }
  return os.str();
}

}  // namespace pfwi
