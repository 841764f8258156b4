#include "pfwi/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "pfwi/errors.hpp"

static_assert(std::endian::native == std::endian::little, "file formats assume a little-endian host");

namespace pfwi {

std::string OutputHeader::csv_line() const {
  std::ostringstream os;
  os << "# version nx nz dt seed\n# " << version << ' ' << nx << ' ' << nz << ' '
     << std::setprecision(17) << dt << ' ' << seed;
  return os.str();
}

namespace {

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), os_(path, std::ios::binary | std::ios::trunc) {
    if (!os_) throw IoError("cannot open " + path + " for writing");
  }
  template <class T>
  void put(T v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }
  void close() {
    os_.close();
    if (!os_) throw IoError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream os_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), is_(path, std::ios::binary) {
    if (!is_) throw IoError("cannot open " + path);
  }
  template <class T>
  T get() {
    T v;
    bytes(&v, sizeof(T));
    return v;
  }
  void bytes(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw TruncatedFile(path_ + " ends early");
  }
  void magic(const char* m) {
    char got[4];
    bytes(got, 4);
    if (std::memcmp(got, m, 4) != 0) throw MagicMismatch(path_ + " is not a " + std::string(m, 4) + " file");
  }
  void expect_end() {
    if (is_.peek() != std::char_traits<char>::eof()) throw IoError(path_ + " has trailing bytes");
  }

 private:
  std::string path_;
  std::ifstream is_;
};

}  // namespace

void write_traces(const std::string& path, const SeismogramSet& s) {
  if (s.data.size() != s.n_receivers() * s.n_samples * s.n_components)
    throw ValidationError("trace data size does not match its header");
  Writer w(path);
  w.bytes("PFWI", 4);
  w.put<std::uint32_t>(kTraceVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.n_receivers()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.n_components));
  w.put<std::uint64_t>(s.n_samples);
  w.put<double>(s.dt);
  for (const auto& r : s.receivers) {
    w.put<double>(r.x);
    w.put<double>(r.z);
    if (r.mask.size() != s.n_components) throw ValidationError("receiver mask length mismatch");
    w.bytes(r.mask.data(), r.mask.size());
  }
  w.bytes(s.data.data(), s.data.size() * sizeof(double));
  w.close();
}

SeismogramSet read_traces(const std::string& path) {
  Reader r(path);
  r.magic("PFWI");
  const auto version = r.get<std::uint32_t>();
  if (version != kTraceVersion)
    throw VersionUnsupported(path + ": trace format version " + std::to_string(version));
  SeismogramSet s;
  const auto nr = r.get<std::uint32_t>();
  const auto nc = r.get<std::uint32_t>();
  const auto ns = r.get<std::uint64_t>();
  s.dt = r.get<double>();
  s.receivers.resize(nr);
  for (auto& rc : s.receivers) {
    rc.x = r.get<double>();
    rc.z = r.get<double>();
    rc.mask.resize(nc);
    r.bytes(rc.mask.data(), nc);
  }
  s.n_samples = ns;
  s.n_components = nc;
  s.data.resize(static_cast<std::size_t>(nr) * ns * nc);
  r.bytes(s.data.data(), s.data.size() * sizeof(double));
  r.expect_end();
  return s;
}

void require_same_sampling(const SeismogramSet& s, double dt, std::size_t n_samples) {
  if (std::abs(s.dt - dt) > 1e-12 * dt || s.n_samples != n_samples) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "observed traces have dt = " << s.dt << " and " << s.n_samples
        << " samples but the run uses dt = " << dt << " and " << n_samples
        << " samples; refusing to resample";
    throw ValidationError(msg.str());
  }
}

const std::vector<double>* GridFile::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return &fields[i];
  return nullptr;
}

void write_grid(const std::string& path, const GridFile& g) {
  Writer w(path);
  w.bytes("PFGD", 4);
  w.put<std::uint32_t>(kGridVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.grid.nx));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.grid.nz));
  w.put<double>(g.grid.dx);
  w.put<double>(g.grid.dz);
  w.put<double>(g.grid.x0);
  w.put<double>(g.grid.z0);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.names.size()));
  for (const auto& n : g.names) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(n.size()));
    w.bytes(n.data(), n.size());
  }
  for (const auto& f : g.fields) {
    if (f.size() != g.grid.size()) throw ValidationError("grid field size mismatch");
    w.bytes(f.data(), f.size() * sizeof(double));
  }
  w.close();
}

GridFile read_grid(const std::string& path) {
  Reader r(path);
  r.magic("PFGD");
  const auto version = r.get<std::uint32_t>();
  if (version != kGridVersion) throw VersionUnsupported(path + ": grid format version " + std::to_string(version));
  GridFile g;
  g.grid.nx = r.get<std::uint32_t>();
  g.grid.nz = r.get<std::uint32_t>();
  g.grid.dx = r.get<double>();
  g.grid.dz = r.get<double>();
  g.grid.x0 = r.get<double>();
  g.grid.z0 = r.get<double>();
  const auto nf = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < nf; ++i) {
    const auto len = r.get<std::uint32_t>();
    if (len > 4096) throw IoError(path + ": implausible field-name length");
    std::string n(len, '\0');
    r.bytes(n.data(), len);
    g.names.push_back(std::move(n));
  }
  g.fields.assign(nf, std::vector<double>(g.grid.size()));
  for (auto& f : g.fields) r.bytes(f.data(), f.size() * sizeof(double));
  r.expect_end();
  return g;
}

void write_sidecar(const std::string& path, const OutputHeader& h) {
  nlohmann::json j;
  j["version"] = h.version;
  j["nx"] = h.nx;
  j["nz"] = h.nz;
  j["dt"] = h.dt;
  j["seed"] = h.seed;
  std::ofstream os(path + ".json");
  if (!os) throw IoError("cannot write " + path + ".json");
  os << j.dump(2) << '\n';
}

GridFile material_to_grid(const MaterialField& mf, const Grid2D& grid) {
  GridFile g;
  g.grid = grid;
  for (ParamId id : all_params()) {
    g.names.emplace_back(param_name(id));
    std::vector<double> f(mf.size());
    for (std::size_t c = 0; c < mf.size(); ++c) f[c] = mf.param(c, id);
    g.fields.push_back(std::move(f));
  }
  return g;
}

MaterialField material_from_grid(const GridFile& g, const PoroelasticParams& base) {
  for (const auto& n : g.names)
    if (!param_from_name(n)) throw ParseError("unknown material field '" + n + "' in grid file");
  std::vector<PoroelasticParams> cells(g.grid.size(), base);
  for (std::size_t i = 0; i < g.names.size(); ++i) {
    const ParamId id = *param_from_name(g.names[i]);
    for (std::size_t c = 0; c < cells.size(); ++c) set_param(cells[c], id, g.fields[i][c]);
  }
  MaterialField mf(g.grid.nx, g.grid.nz, base);
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (!(cells[c] == base)) mf.set_cell(c, cells[c]);
  return mf;
}

GridFile snapshot_to_grid(const Wavefield& w) {
  GridFile g;
  g.grid = w.grid();
  for (std::size_t f = 0; f < w.n_fields(); ++f) {
    g.names.push_back(field_name(f, w.n1()));
    g.fields.emplace_back(w.field(f).begin(), w.field(f).end());
  }
  return g;
}

Wavefield snapshot_from_grid(const GridFile& g, std::size_t n1, std::size_t n3) {
  Wavefield w(g.grid, n1, n3);
  if (g.fields.size() != w.n_fields()) throw GeometryMismatch("snapshot field count mismatch");
  for (std::size_t f = 0; f < w.n_fields(); ++f) std::copy(g.fields[f].begin(), g.fields[f].end(), w.field(f).begin());
  return w;
}

GridFile gradient_to_grid(const GradientField& gf) {
  GridFile g;
  g.grid = gf.grid;
  for (std::size_t k = 0; k < gf.params.size(); ++k) {
    g.names.push_back("d_" + std::string(param_name(gf.params[k])));
    g.fields.push_back(gf.values[k]);
  }
  return g;
}

namespace {

std::ofstream open_csv(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << std::setprecision(17);
  return os;
}

}  // namespace

void write_energy_csv(const std::string& path, const EnergyLedger& ledger, const OutputHeader& h) {
  auto os = open_csv(path);
  os << h.csv_line() << "\nt,E1,E2,E3,Etot,D,balance_residual,D_sponge\n";
  for (const auto& s : ledger.samples)
    os << s.t << ',' << s.parts.E1 << ',' << s.parts.E2 << ',' << s.parts.E3 << ',' << s.Etot << ','
       << s.parts.D << ',' << s.balance << ',' << s.parts.D_sponge << '\n';
  if (!os) throw IoError("write failed: " + path);
}

void write_history_csv(const std::string& path, const std::vector<MisfitReport>& hist,
                       const OutputHeader& h) {
  auto os = open_csv(path);
  os << h.csv_line() << "\niteration,chi,grad_norm,step,evaluations\n";
  for (const auto& r : hist)
    os << r.iteration << ',' << r.chi << ',' << r.grad_norm << ',' << r.step << ',' << r.evaluations << '\n';
  if (!os) throw IoError("write failed: " + path);
}

void write_traces_csv(const std::string& path, const SeismogramSet& s, const OutputHeader& h,
                      std::size_t n1) {
  auto os = open_csv(path);
  os << h.csv_line() << "\nt";
  for (std::size_t r = 0; r < s.n_receivers(); ++r)
    for (std::size_t c = 0; c < s.n_components; ++c)
      if (s.receivers[r].mask[c]) os << ",r" << r << '_' << field_name(c, n1);
  os << '\n';
  for (std::size_t n = 0; n < s.n_samples; ++n) {
    os << static_cast<double>(n) * s.dt;
    for (std::size_t r = 0; r < s.n_receivers(); ++r)
      for (std::size_t c = 0; c < s.n_components; ++c)
        if (s.receivers[r].mask[c]) os << ',' << s.at(r, n, c);
    os << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace pfwi
