#include <doctest.h>

#include <fstream>
#include <string>

#include "bdyn/error.hpp"
#include "bdyn/scenario.hpp"
#include "support.hpp"

using namespace bdyn;
using nlohmann::json;

namespace {

std::string message_of(const json& j) {
  try {
    parse_scenario(j);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

json torus_json() {
  return json::parse(R"json({"kind": "bcontact", "surface": "torus", "f": "cos(v)", "beta_u": "sin(v)"})json");
}

}  // namespace

TEST_CASE("built-in sphere scenario") {
  const Scenario s = load_scenario(testing::scenario_path("sphere"));
  CHECK(s.name == "sphere");
  CHECK(s.kind == ScenarioKind::BContact);
  REQUIRE(s.components.size() == 1);
  const ComponentSpec& c = s.components[0];
  CHECK(c.surface == SurfaceKind::Sphere);
  CHECK(c.form.f == "cos(theta)");
  CHECK(c.form.beta_v == "sin(theta)^2");
  REQUIRE(c.north.has_value());
  CHECK(c.north->f == "sqrt(1-u^2-v^2)");
  CHECK(c.south->beta_u == "v");
  CHECK(s.grid.nu == 64);
  CHECK(s.fan_seeds == 16);
  CHECK(s.offset == 1e-4);
  CHECK(s.output == "out/sphere");
}

TEST_CASE("every built-in scenario loads") {
  for (const char* name : {"sphere", "torus", "two_spheres", "beltrami_torus", "mcgehee_infinity", "mcgehee_finite"})
    CHECK_NOTHROW(load_scenario(testing::scenario_path(name)));
  const Scenario two = load_scenario(testing::scenario_path("two_spheres"));
  CHECK(two.components.size() == 2);
  const Scenario mc = load_scenario(testing::scenario_path("mcgehee_finite"));
  REQUIRE(mc.mcgehee.has_value());
  CHECK(mc.mcgehee->mu == 0.5);
  CHECK(mc.mcgehee->states.size() == 2);
  const Scenario b = load_scenario(testing::scenario_path("beltrami_torus"));
  REQUIRE(b.beltrami.has_value());
  CHECK(b.beltrami->lambda == 2.0);
}

TEST_CASE("defaults are filled in") {
  const Scenario s = parse_scenario(torus_json());
  CHECK(s.name == "bcontact");
  CHECK(s.epsilon == 0.5);
  CHECK(s.scan == 128);
  CHECK(s.tol.rtol == 1e-10);
  CHECK(s.tol.limit == 1e-5);
  CHECK(s.components[0].form.beta_v == "0");
  CHECK(s.output == "out/bcontact");
  const auto echo = to_json(s);
  CHECK(echo.begin().key() == "name");
  CHECK(echo["tolerances"]["rtol"] == 1e-10);
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = torus_json();
  j["fff"] = 1;
  CHECK(message_of(j).find("unknown key 'fff'") != std::string::npos);

  json t = torus_json();
  t["tolerances"] = {{"reeb", 1e-9}, {"rebe", 1e-9}};
  CHECK(message_of(t).find("unknown key 'tolerances.rebe'") != std::string::npos);

  json p = json::parse(std::ifstream(testing::scenario_path("sphere")));
  p["poles"]["north"]["beta_q"] = "0";
  CHECK(message_of(p).find("poles.north.beta_q") != std::string::npos);
}

TEST_CASE("schema violations") {
  json j = torus_json();
  j["epsilon"] = -0.5;
  CHECK(message_of(j).find("epsilon") != std::string::npos);

  j = torus_json();
  j["f"] = "cos(";
  CHECK(message_of(j).find("'f'") != std::string::npos);

  j = torus_json();
  j["f"] = "cos(theta)";
  CHECK(message_of(j).find("unknown identifier 'theta'") != std::string::npos);

  j = torus_json();
  j["grid"] = {64, 64};
  CHECK(!message_of(j).empty());

  j = torus_json();
  j["kind"] = "other";
  CHECK(!message_of(j).empty());

  j = torus_json();
  j.erase("f");
  CHECK(message_of(j).find("missing key 'f'") != std::string::npos);

  json sphere = json::parse(std::ifstream(testing::scenario_path("sphere")));
  sphere.erase("poles");
  CHECK(message_of(sphere).find("poles") != std::string::npos);

  json b = json::parse(R"json({"kind": "beltrami", "F": "cos(u)", "lambda": 0})json");
  CHECK(!message_of(b).empty());

  json m = json::parse(R"json({"kind": "mcgehee", "mu": 1.5, "states": [{"x": 0}]})json");
  CHECK(!message_of(m).empty());
  m = json::parse(R"json({"kind": "mcgehee", "states": []})json");
  CHECK(!message_of(m).empty());
}

TEST_CASE("JSON syntax errors name the file and line") {
  const auto dir = testing::temp_dir("scenario");
  const std::string empty = (dir / "empty.json").string();
  std::ofstream(empty).close();
  CHECK_THROWS_AS(load_scenario(empty), ScenarioError);

  const std::string broken = (dir / "broken.json").string();
  std::ofstream(broken) << "{\n  \"kind\": \"bcontact\",\n  \"surface\": \"torus\"\n  \"f\": \"1\"\n}\n";
  try {
    load_scenario(broken);
    FAIL("expected a parse error");
  } catch (const ScenarioError& e) {
    CHECK(std::string(e.what()).find(broken + ":4:") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario((dir / "missing.json").string()), ScenarioError);
}
