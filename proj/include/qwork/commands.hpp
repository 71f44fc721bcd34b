#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qwork/config.hpp"

namespace qwork {

inline constexpr const char* kToolVersion = "0.1.0";

// Flag-level overrides of configuration leaves; absent fields keep the config
// (or built-in) value.
struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> output_path;
  std::optional<std::string> format;
  std::optional<double> t;
  std::optional<double> beta;
  std::optional<double> energy_scale;
  std::optional<double> dt;
  std::optional<double> leak_tol;
  std::optional<double> tolerance;
  std::optional<int> dim;
  std::optional<int> cumulant_order;
  // weights plotting
  std::optional<int> n;
  std::optional<double> z_max;
  std::optional<int> z_count;
  std::optional<int> s_min;
  std::optional<int> s_max;
  // casimir
  std::optional<std::string> geometry;
  std::optional<double> separation_initial;
  std::optional<std::vector<double>> separations;
  std::optional<double> regulator;
  std::optional<int> max_modes;
};

// Per-mode outcome of the closed-form vs oracle comparison.
struct VerifyRow {
  std::string mode;
  std::string state;
  int points = 0;
  double max_abs_err = 0.0;
  double leak = 0.0;
  double unitarity_defect = 0.0;
  double mass_deficit = 0.0;
};

/// Runs the two-point-measurement oracle against the closed-form
/// characteristic functions for every mode of the scenario (modes propagate
/// concurrently; the row order is the mode order).
std::vector<VerifyRow> verify_scenario(const ScenarioConfig& config);

/// Bundled scenario used by `verify` when no config is given.
const char* default_scenario_json();

/// Executes a subcommand (drive | cf | dist | weights | moments | jarzynski |
/// casimir | verify) and writes its table. Returns the process exit code:
/// 0 success, 2 configuration error, 3 numeric failure.
int run_command(const std::string& subcommand, const CommandOptions& options,
                std::ostream& diagnostics);

}  // namespace qwork
