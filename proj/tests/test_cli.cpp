#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path;
  Scratch() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("pfwi_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Scratch() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + PFWI_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config(const char* name) { return std::string("\"") + PFWI_CONFIG_DIR + "/" + name + "\""; }

}  // namespace

TEST_CASE("usage errors exit with the validation code") {
  CHECK(run("") == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("no-such-command --config x") == 2);
}

TEST_CASE("a missing config file is an io failure") {
  Scratch s;
  CHECK(run("simulate --config \"" + (s.path / "absent.ini").string() + "\"") == 4);
}

TEST_CASE("an invalid config is a validation failure") {
  Scratch s;
  const fs::path bad = s.path / "bad.ini";
  std::ofstream(bad) << "[material]\nphi = 1.2\n";
  CHECK(run("simulate --config \"" + bad.string() + "\" --out \"" + s.path.string() + "\"") == 2);
}

TEST_CASE("adjoint-test passes and echoes the configuration") {
  Scratch s;
  CHECK(run("adjoint-test --config " + config("desk.ini") + " --out \"" + s.path.string() + "\" --threads 2") == 0);
  CHECK(fs::exists(s.path / "config.echo.ini"));
}

TEST_CASE("fit-kernel writes the kernel file") {
  Scratch s;
  CHECK(run("fit-kernel --config " + config("desk.ini") + " --out \"" + s.path.string() + "\"") == 0);
  CHECK(fs::file_size(s.path / "kernels.txt") > 0);
}
