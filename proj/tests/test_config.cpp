#include <string>

#include "common.hpp"
#include "doctest.h"
#include "pfwi/config.hpp"
#include "pfwi/errors.hpp"

using namespace pfwi;

namespace {

const std::string kMaterial = R"([material]
phi = 0.2
rho_s = 2500
rho_f = 1000
eta = 1e-3
K_s = 40e9
K_f = 2.5e9
kappa_1 = 1e-9
kappa_3 = 1e-9
alpha_inf_1 = 2
alpha_inf_3 = 2
c11 = 16e9
c12 = 4e9
c13 = 4e9
c33 = 16e9
c55 = 6e9
)";

const std::string kGridTime = R"(
[grid]
nx = 40
nz = 30
dx = 5
dz = 5

[time]
t_final = 0.1

[boundary]
width = 6

[kernel]
f_min = 3
f_max = 300
)";

const std::string kShot = R"(
[source]
x = 100
z = 75
f0 = 30

[receivers]
x = 120
z = 75
)";

std::string what_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config fills defaults and its echo parses back") {
  const RunConfig c = parse_config(kMaterial + kGridTime + kShot);
  CHECK(c.grid.nx == 40);
  CHECK(c.sim.cfl_safety == 0.5);
  CHECK(c.sim.boundary.strength == 20.0);
  CHECK(c.kernel.enabled);
  REQUIRE(c.sources.size() == 1);
  REQUIRE(c.receivers.size() == 1);
  CHECK_NOTHROW(require_for_command(c, "simulate"));
  const RunConfig again = parse_config(c.echo());
  CHECK(again.echo() == c.echo());
  CHECK(again.material.kappa[0] == c.material.kappa[0]);
  CHECK(again.sim.t_final == c.sim.t_final);
}

TEST_CASE("non-physical porosity is named") {
  std::string text = kMaterial + kGridTime;
  text.replace(text.find("phi = 0.2"), 9, "phi = 1.2");
  CHECK_THROWS_AS(parse_config(text), ValidationError);
  CHECK(what_of(text).find("phi") != std::string::npos);
}

TEST_CASE("unknown keys and bad values carry the line number") {
  const std::string unknown = "[grid]\nnx = 10\nwidth_of_things = 3\n";
  CHECK_THROWS_AS(parse_config(unknown), ParseError);
  CHECK(what_of(unknown).find("line 3") != std::string::npos);
  CHECK(what_of(unknown).find("width_of_things") != std::string::npos);
  const std::string bad_value = kMaterial + "\n[grid]\nnx = ten\n";
  CHECK_THROWS_AS(parse_config(bad_value), ParseError);
  CHECK_THROWS_AS(parse_config("[nosuchsection]\n"), ParseError);
  CHECK_THROWS_AS(parse_config("nx = 3\n"), ParseError);
}

TEST_CASE("every violated invariant is reported at once") {
  std::string text = kMaterial + kGridTime;
  text.replace(text.find("t_final = 0.1"), 13, "t_final = -1");
  text.replace(text.find("dx = 5"), 6, "dx = 0");
  const std::string w = what_of(text);
  CHECK(w.find("t_final") != std::string::npos);
  CHECK(w.find("dx") != std::string::npos);
}

TEST_CASE("commands check their own requirements") {
  const RunConfig bare = parse_config(kMaterial + kGridTime);
  CHECK_THROWS_AS(require_for_command(bare, "simulate"), ValidationError);
  CHECK_NOTHROW(require_for_command(bare, "fit-kernel"));
  const RunConfig c = parse_config(kMaterial + kGridTime + kShot +
                                   "\n[inversion]\nparams = kappa_1\nlower_kappa_1 = 1e-10\nupper_kappa_1 = 1e-7\nscale_kappa_1 = 1e-9\n");
  CHECK(c.has_inversion);
  CHECK_THROWS_AS(require_for_command(c, "invert"), ValidationError);
}

TEST_CASE("shipped config loads and missing inputs are reported") {
  const std::string dir = PFWI_CONFIG_DIR;
  const RunConfig c = load_config(dir + "/desk.ini");
  CHECK(c.shots().size() == 2);
  CHECK(c.receiver_specs(16).size() == 8);
  CHECK(c.seed == 7);
  // relative trace paths resolve against the config directory, where nothing was simulated
  CHECK_THROWS_AS(load_config(dir + "/desk_invert.ini"), ValidationError);
  CHECK_THROWS_AS(load_config("/nonexistent/pfwi.ini"), IoError);
}
