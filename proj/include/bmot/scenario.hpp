#pragma once

// Scenario documents: {"kind": "gaussian" | "discrete" | "approx",
// "seed": n, "payload": {...}, "tolerances": {...}}.

#include <filesystem>
#include <string>
#include <vector>

#include "bmot/io.hpp"

namespace bmot {

/// value <= limit.
struct Contract {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass = false;
};

struct ScenarioOutcome {
  io::Json report;
  std::vector<Contract> contracts;
  std::string summary;

  bool pass() const;
};

/// Relative paths in the payload resolve against `base_dir`. Throws
/// ParseError, ValidationError or NumericalError; contract failures are
/// reported, not thrown.
ScenarioOutcome run_scenario(const io::Json& doc, const std::filesystem::path& base_dir);

ScenarioOutcome run_scenario_file(const std::filesystem::path& path);

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitContract = 1,
  kExitParse = 2,
  kExitValidation = 3,
  kExitNumerical = 4,
};

}  // namespace bmot
