#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pfwi/config.hpp"
#include "pfwi/errors.hpp"
#include "pfwi/io.hpp"

using namespace pfwi;

// Writes the configured material as a grid file, optionally with a block of
// cells set to a new parameter value.
int main(int argc, char** argv) {
  CLI::App app{"pfwi_model: write a material grid file from a run configuration"};
  std::string config, out, param;
  std::vector<std::size_t> box;
  double value = 0.0;
  app.add_option("--config", config, "run configuration file")->required();
  app.add_option("--out", out, "grid file to write")->required();
  app.add_option("--param", param, "parameter to change, e.g. kappa_1");
  app.add_option("--value", value, "new value inside the box");
  app.add_option("--cells", box, "i0 i1 j0 j1 (inclusive)")->expected(4);
  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = load_config(config);
    MaterialField mf = build_material(cfg);
    if (!param.empty()) {
      const auto id = param_from_name(param);
      if (!id) throw ValidationError("unknown parameter '" + param + "'");
      if (box.size() != 4) throw ValidationError("--cells i0 i1 j0 j1 is required with --param");
      if (box[0] > box[1] || box[2] > box[3] || box[1] >= cfg.grid.nx || box[3] >= cfg.grid.nz)
        throw ValidationError("--cells box is empty or outside the grid");
      for (std::size_t j = box[2]; j <= box[3]; ++j)
        for (std::size_t i = box[0]; i <= box[1]; ++i) mf.set_param(cfg.grid.index(i, j), *id, value);
    }
    write_grid(out, material_to_grid(mf, cfg.grid));
    std::cout << "wrote " << out << " (" << cfg.grid.nx << "x" << cfg.grid.nz << ")\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Io ? 4 : e.kind() == ErrorKind::Numerical ? 3 : 2;
  }
  return 0;
}
