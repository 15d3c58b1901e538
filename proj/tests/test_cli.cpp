#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

int run_bdyn(const std::string& args) {
  const std::string cmd = std::string("\"") + BDYN_EXE + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string scen(const std::string& name) { return "--scenario \"" + testing::scenario_path(name) + "\""; }

}  // namespace

TEST_CASE("exit codes") {
  const auto out = testing::temp_dir("cli");
  const std::string o = " --out \"" + out.string() + "\"";
  CHECK(run_bdyn("--help") == 0);
  CHECK(run_bdyn("validate " + scen("torus") + o) == 0);
  CHECK(fs::exists(out / "report.json"));
  CHECK(run_bdyn("validate " + scen("torus") + o + " --grid 16,16,5") == 0);
  CHECK(run_bdyn("mcgehee " + scen("mcgehee_infinity") + o) == 0);
  CHECK(run_bdyn("beltrami " + scen("beltrami_torus") + o) == 0);

  // Operational errors.
  CHECK(run_bdyn("") == 1);
  CHECK(run_bdyn("validate") == 1);
  CHECK(run_bdyn("validate --scenario /nonexistent.json") == 1);
  CHECK(run_bdyn("frobnicate " + scen("torus")) == 1);
  CHECK(run_bdyn("validate " + scen("torus") + o + " --grid 16,16") == 1);
  CHECK(run_bdyn("validate " + scen("torus") + o + " --tol -1") == 1);
  CHECK(run_bdyn("mcgehee " + scen("torus") + o) == 1);

  // Verdict failure: an impossible Reeb tolerance.
  const fs::path strict = out / "strict.json";
  {
    std::ifstream in(testing::scenario_path("torus"));
    auto j = nlohmann::json::parse(in);
    j["tolerances"] = {{"reeb", 1e-30}};
    std::ofstream(strict) << j.dump();
  }
  CHECK(run_bdyn("validate --scenario \"" + strict.string() + "\"" + o) == 2);
}
