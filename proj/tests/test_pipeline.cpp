#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bdyn/pipeline.hpp"
#include "bdyn/scenario.hpp"
#include "support.hpp"

using namespace bdyn;
namespace fs = std::filesystem;

namespace {

Scenario scenario(const std::string& name, const std::string& tag) {
  Scenario s = load_scenario(testing::scenario_path(name));
  s.output = testing::temp_dir(tag).string();
  return s;
}

nlohmann::ordered_json read_report(const Scenario& s) {
  std::ifstream in(fs::path(s.output) / "report.json");
  return nlohmann::ordered_json::parse(in);
}

bool check_passed(const nlohmann::ordered_json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["name"] == name) return c["passed"].get<bool>();
  FAIL("missing check " << name);
  return false;
}

}  // namespace

TEST_CASE("commands round-trip through their names") {
  for (Command c : {Command::Validate, Command::Critical, Command::Trace, Command::Census, Command::Beltrami,
                    Command::McGehee, Command::All})
    CHECK(parse_command(to_string(c)) == c);
  CHECK(!parse_command("bogus").has_value());
}

TEST_CASE("sphere census") {
  const Scenario s = scenario("sphere", "pipe_sphere");
  const RunResult r = run(s, Command::Census);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report["verdict"] == "pass");
  const auto& c = r.report["census"];
  CHECK(c["distinct"] == 4);
  CHECK(c["weighted"] == 4);
  CHECK(c["expected-weighted"] == 4);
  CHECK(c["bound"] == "at-least-2");
  CHECK(c["agree"] == true);
  CHECK(r.report["critical_points"].size() == 2);
  CHECK(fs::exists(fs::path(s.output) / "census.csv"));
  CHECK(fs::exists(fs::path(s.output) / "orbits" / "orbit_000.csv"));
  // report.json on disk is the returned report.
  CHECK(read_report(s) == r.report);
  CHECK(check_passed(r.report, "morse-inequalities"));
  CHECK(check_passed(r.report, "euler-characteristic"));
}

TEST_CASE("reports are deterministic apart from timing") {
  const Scenario s = scenario("torus", "pipe_det");
  auto a = run(s, Command::Critical).report;
  auto b = run(s, Command::Critical).report;
  a.erase("timing");
  b.erase("timing");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("report key order") {
  const RunResult r = run(scenario("torus", "pipe_keys"), Command::Validate);
  std::vector<std::string> keys;
  for (auto it = r.report.begin(); it != r.report.end(); ++it) keys.push_back(it.key());
  REQUIRE(keys.size() >= 3);
  CHECK(keys.front() == "scenario");
  CHECK(keys.back() == "timing");
}

TEST_CASE("verdict failures exit 2, operational errors exit 1") {
  Scenario s = scenario("torus", "pipe_fail");
  s.tol.reeb = 1e-30;
  const RunResult r = run(s, Command::Validate);
  CHECK(r.exit_code == kExitVerdict);
  CHECK(r.report["verdict"] == "fail");
  CHECK(fs::exists(fs::path(s.output) / "report.json"));

  const RunResult wrong = run(scenario("torus", "pipe_kind"), Command::McGehee);
  CHECK(wrong.exit_code == kExitOperational);
  CHECK(wrong.report.contains("error"));

  Scenario nm = scenario("torus", "pipe_notmorse");
  nm.components[0].form = {"2+cos(v)^3", "sin(v)", "0", "0"};
  const RunResult bad = run(nm, Command::Critical);
  CHECK(bad.exit_code == kExitVerdict);
}

TEST_CASE("Beltrami and McGehee pipelines") {
  const Scenario b = scenario("beltrami_torus", "pipe_beltrami");
  const RunResult rb = run(b, Command::Beltrami);
  CHECK(rb.exit_code == kExitPass);
  CHECK(check_passed(rb.report, "beltrami-roundtrip"));

  const Scenario m = scenario("mcgehee_infinity", "pipe_mcgehee");
  const RunResult rm = run(m, Command::McGehee);
  CHECK(rm.exit_code == kExitPass);
  CHECK(fs::exists(fs::path(m.output) / "mcgehee_comparison.json"));
  std::ifstream in(fs::path(m.output) / "orbits" / "mcgehee_000.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x,a,Pr,Pa,H");
}
