#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "bdyn/error.hpp"
#include "bdyn/pipeline.hpp"
#include "bdyn/scenario.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::string out;
  std::optional<double> tol;
  std::string grid;
  std::optional<int> seeds;
};

bdyn::GridSpec parse_grid(const std::string& text) {
  std::istringstream in(text);
  std::string part;
  std::vector<int> n;
  while (std::getline(in, part, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty() || v < 2 || v > 4096)
      throw bdyn::ScenarioError("--grid expects three integers in [2, 4096] as n,n,n");
    n.push_back(v);
  }
  if (n.size() != 3) throw bdyn::ScenarioError("--grid expects three integers in [2, 4096] as n,n,n");
  return {n[0], n[1], n[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape orbits of singular b-contact forms, b-Beltrami checks and McGehee dynamics"};
  app.require_subcommand(1, 1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "contact condition, Reeb residuals, identity on Z, chart consistency"},
      {"critical", "validate, then critical points, stability and the census bound"},
      {"trace", "critical, then trace the invariant manifolds of every critical point"},
      {"census", "trace, then the escape-orbit census against the bound"},
      {"beltrami", "Beltrami identities on Z and the induced b-contact form"},
      {"mcgehee", "McGehee energy, infinity periodicity and the Newtonian oracle"},
      {"all", "every stage the scenario kind supports"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", flags.scenario, "scenario JSON file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides the scenario)");
    sub->add_option("--tol", flags.tol, "integrator relative tolerance; absolute tolerance is 1e-2 of it")
        ->check(CLI::PositiveNumber);
    sub->add_option("--grid", flags.grid, "validation grid nu,nv,nz");
    sub->add_option("--seeds", flags.seeds, "seeds per invariant-manifold fan")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bdyn::kExitOperational;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    bdyn::Scenario s = bdyn::load_scenario(flags.scenario);
    if (!flags.out.empty()) s.output = flags.out;
    if (flags.tol) {
      s.tol.rtol = s.tol.mc_rtol = *flags.tol;
      s.tol.atol = s.tol.mc_atol = *flags.tol * 1e-2;
    }
    if (!flags.grid.empty()) s.grid = parse_grid(flags.grid);
    if (flags.seeds) s.fan_seeds = *flags.seeds;

    const bdyn::RunResult r = bdyn::run(s, *bdyn::parse_command(name));
    for (const auto& c : r.report["checks"])
      if (!c["passed"].get<bool>()) std::cerr << "FAIL " << c["name"].get<std::string>() << ": " << c["value"].dump()
                                              << " (threshold " << c["threshold"].dump() << ")\n";
    if (r.report.contains("error")) std::cerr << "error: " << r.report["error"].get<std::string>() << '\n';
    std::cout << name << ": " << r.report["verdict"].get<std::string>() << " (" << s.output << "/report.json)\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bdyn::kExitOperational;
  }
}
