#pragma once
// Scenario files: strict JSON, unknown keys rejected, defaults filled in.
// The schema is documented in README.md.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdyn/bform.hpp"
#include "bdyn/beltrami.hpp"
#include "bdyn/chart.hpp"
#include "bdyn/mcgehee.hpp"

namespace bdyn {

enum class ScenarioKind { BContact, Beltrami, McGehee };
std::string to_string(ScenarioKind kind);

// Coefficients of f dz/z + beta_u du + beta_v dv + beta_z dz in one patch.
struct FormSpec {
  std::string f = "0", beta_u = "0", beta_v = "0", beta_z = "0";
};

struct ComponentSpec {
  SurfaceKind surface = SurfaceKind::Torus;
  FormSpec form;                    // torus patch, or north angular patch (theta, phi)
  std::optional<FormSpec> north, south;  // sphere pole patches (u, v)
  double pole_exclusion = TubularChart::kDefaultPoleExclusion;
};

struct Tolerances {
  double contact = 1e-8;     // min |alpha ^ d alpha| coefficient
  double reeb = 1e-9;        // Reeb equations residual
  double identity = 1e-9;    // i_R omega = df on Z
  double chart = 1e-8;       // patch overlap agreement
  double spectral = 1e-6;    // DR(p) eigenvalues vs closed forms, relative
  double limit = 1e-5;       // distance for limits-to verdicts and robustness shift
  double rtol = 1e-10;       // orbit integrator
  double atol = 1e-12;
  double beltrami_identity = 1e-8;
  double laplace = 1e-6;     // relative spread of Delta F / F
  double roundtrip = 1e-10;
  double divergence = 1e-8;
  double beltrami_spectral = 1e-10;
  double rescaling = 1e-8;
  double mc_rtol = 1e-12;    // McGehee integrators
  double mc_atol = 1e-14;
  double energy = 1e-8;
  double periodicity = 1e-8;
  double oracle = 1e-6;
  double reversal = 1e-7;
};

struct BeltramiSpec {
  std::string F;
  std::string h11 = "1", h12 = "0", h22 = "1";
  double lambda = 1.0;
  std::optional<std::array<std::string, 3>> extension;  // X_u, X_v, X_z over (u, v, z)
};

struct McGeheeSpec {
  double mu = 0.5;
  std::vector<McState> states;
  double t_end = 100.0;
  double oracle_t_end = 10.0;
  double reversal_t_end = 20.0;
  double dt_out = 0.1;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::BContact;
  double epsilon = 0.5;
  GridSpec grid{64, 64, 9};  // validation grid
  int scan = 128;            // critical-point scan resolution per axis
  Tolerances tol;
  int fan_seeds = 16;
  double offset = 1e-4;
  double t_max = 200.0;
  std::string output = "out";
  std::vector<ComponentSpec> components;
  std::optional<BeltramiSpec> beltrami;
  std::optional<McGeheeSpec> mcgehee;
};

// Throws ScenarioError naming the file and line for malformed JSON, and the
// offending key path for schema violations.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const nlohmann::json& j);

// Defaults filled in; key order fixed.
nlohmann::ordered_json to_json(const Scenario& s);

// Throws ScenarioError if an expression does not parse.
BComponent build_component(const ComponentSpec& spec, double epsilon);
BeltramiData build_beltrami(const BeltramiSpec& spec);

}  // namespace bdyn
