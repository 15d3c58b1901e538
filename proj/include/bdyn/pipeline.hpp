#pragma once
// Orchestration: validate -> critical -> trace -> census for b-contact data,
// plus the Beltrami and McGehee pipelines. One report.json per run.

#include <optional>
#include <string>

#include <json.hpp>

#include "bdyn/scenario.hpp"

namespace bdyn {

enum class Command { Validate, Critical, Trace, Census, Beltrami, McGehee, All };
std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

inline constexpr int kExitPass = 0;
inline constexpr int kExitOperational = 1;
inline constexpr int kExitVerdict = 2;

struct RunResult {
  nlohmann::ordered_json report;
  int exit_code = kExitPass;
};

// Never throws for module failures: they are recorded under "error" with a
// nonzero exit code. Artifacts go to scenario.output; report.json is written
// last, also on failure. Only the "timing" key varies between reruns.
RunResult run(const Scenario& scenario, Command command);

}  // namespace bdyn
