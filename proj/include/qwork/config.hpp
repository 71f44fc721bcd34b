#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qwork/casimir.hpp"
#include "qwork/charfunc.hpp"
#include "qwork/oracle.hpp"
#include "qwork/protocol.hpp"

namespace qwork {

struct OracleSettings {
  int dim = 128;
  double dt = 0.0;
  double leak_tol = 1e-10;
  double tolerance = 1e-6;  // verify gate on max |closed form - oracle|
  double tail_eps = 1e-12;  // initial-state occupation tail kept out of the TPM sum
};

struct CasimirSettings {
  CavityGeometry geometry = CavityGeometry::ParallelPlates3D;
  double separation_initial = 1.0;
  std::vector<double> separations;  // final separations tabulated by the CLI
  double regulator = 0.0;           // 0 picks the library default
  int max_modes = 200000;
  std::optional<double> beta;       // absent: Delta F column is the zero-point work
};

struct EvaluationConfig {
  double t = 0.0;
  std::vector<double> nu_grid;     // non-empty for cf/verify
  std::vector<double> time_grid;   // drive table; defaults to 101 points on [0, t]
  double beta = 1.0;               // jarzynski / thermal utilities
  int cumulant_order = 3;
  double distribution_eps = 1e-10;
  OracleSettings oracle;
  std::optional<CasimirSettings> casimir;
};

struct OutputConfig {
  std::string format = "csv";  // "csv" | "json-lines"
  std::string path;            // empty: derived from the subcommand name
};

struct ModeEntry {
  ModeSpec spec;
  InitialState state{NumberState{0}};
};

// Full scenario: one drive protocol shared by all modes, one initial state per
// mode, evaluation settings, output routing.
struct ScenarioConfig {
  std::vector<ModeEntry> modes;
  DriveProtocol protocol;
  EvaluationConfig evaluation;
  OutputConfig output;
  double energy_scale = 1.0;    // multiplies every reported energy column
  std::string canonical_text;   // serialized form used for the provenance hash
};

/// Parses and validates a scenario; throws config_error whose message starts
/// with the offending field path.
ScenarioConfig parse_scenario_text(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::string& path);

/// FNV-1a hash of the canonical text, printed into every output header.
std::string config_hash(const ScenarioConfig& config);

}  // namespace qwork
