#include "qwork/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "qwork/errors.hpp"

namespace qwork {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw config_error(path + ": " + what);
}

const json& member(const json& j, const std::string& path, const char* key) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing required field");
  return *it;
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

double req_number(const json& j, const std::string& path, const char* key) {
  return number_at(member(j, path, key), path + "." + key);
}

double opt_number(const json& j, const std::string& path, const char* key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number_at(j.at(key), path + "." + key);
}

int opt_int(const json& j, const std::string& path, const char* key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

std::string req_string(const json& j, const std::string& path, const char* key) {
  const json& v = member(j, path, key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// {"min": a, "max": b, "count": n} or an explicit array
std::vector<double> grid(const json& j, const std::string& path) {
  if (j.is_array()) return number_list(j, path);
  if (!j.is_object()) fail(path, "expected a grid object or array");
  const double lo = req_number(j, path, "min");
  const double hi = req_number(j, path, "max");
  const int count = opt_int(j, path, "count", 0);
  if (count < 1) fail(path + ".count", "must be >= 1");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  return out;
}

SwitchingShape parse_switching(const json& j, const std::string& path) {
  const std::string type = req_string(j, path, "type");
  if (type == "constant") {
    return ConstantSwitch{opt_number(j, path, "amplitude", 1.0)};
  } else if (type == "gaussian") {
    GaussianPulse p;
    p.amplitude = opt_number(j, path, "amplitude", 1.0);
    if (j.contains("center")) p.center = number_at(j.at("center"), path + ".center");
    p.width = req_number(j, path, "width");
    if (!(p.width > 0.0)) fail(path + ".width", "must be > 0");
    return p;
  } else if (type == "raised-cosine") {
    return RaisedCosine{opt_number(j, path, "amplitude", 1.0)};
  } else if (type == "sinusoid") {
    SinusoidSwitch p;
    p.amplitude = opt_number(j, path, "amplitude", 1.0);
    p.angular_frequency = req_number(j, path, "angular_frequency");
    p.phase = opt_number(j, path, "phase", 0.0);
    return p;
  } else if (type == "tabulated") {
    TabulatedSwitch p;
    p.times = number_list(member(j, path, "times"), path + ".times");
    p.values = number_list(member(j, path, "values"), path + ".values");
    if (p.times.size() != p.values.size())
      fail(path + ".values", "must match the length of .times");
    return p;
  }
  fail(path + ".type", "unknown switching type '" + type + "'");
}

FrequencyShape parse_frequency(const json& j, const std::string& path) {
  const std::string type = req_string(j, path, "type");
  if (type == "constant") {
    const double w = req_number(j, path, "omega");
    if (!(w > 0.0)) fail(path + ".omega", "must be > 0");
    return ConstantFrequency{w};
  } else if (type == "linear") {
    LinearRampFrequency p;
    p.omega_start = req_number(j, path, "omega_start");
    p.omega_end = req_number(j, path, "omega_end");
    p.ramp_time = req_number(j, path, "ramp_time");
    if (!(p.omega_start > 0.0)) fail(path + ".omega_start", "must be > 0");
    if (!(p.ramp_time > 0.0)) fail(path + ".ramp_time", "must be > 0");
    return p;
  } else if (type == "tanh") {
    TanhRampFrequency p;
    p.omega_start = req_number(j, path, "omega_start");
    p.omega_end = req_number(j, path, "omega_end");
    p.center = req_number(j, path, "center");
    p.width = req_number(j, path, "width");
    if (!(p.omega_start > 0.0)) fail(path + ".omega_start", "must be > 0");
    if (!(p.omega_end > 0.0)) fail(path + ".omega_end", "must be > 0");
    if (!(p.width > 0.0)) fail(path + ".width", "must be > 0");
    return p;
  } else if (type == "tabulated") {
    TabulatedFrequency p;
    p.times = number_list(member(j, path, "times"), path + ".times");
    p.omegas = number_list(member(j, path, "omegas"), path + ".omegas");
    if (p.times.size() != p.omegas.size())
      fail(path + ".omegas", "must match the length of .times");
    for (std::size_t i = 0; i < p.omegas.size(); ++i)
      if (!(p.omegas[i] > 0.0))
        fail(path + ".omegas[" + std::to_string(i) + "]", "must be > 0");
    return p;
  }
  fail(path + ".type", "unknown frequency type '" + type + "'");
}

InitialState parse_state(const json& j, const std::string& path) {
  const std::string type = req_string(j, path, "type");
  if (type == "number") {
    const int n = opt_int(j, path, "n", -1);
    if (n < 0) fail(path + ".n", "must be an integer >= 0");
    return NumberState{n};
  } else if (type == "thermal") {
    const json& b = member(j, path, "beta");
    double beta;
    if (b.is_string() && (b.get<std::string>() == "inf" || b.get<std::string>() == "infinity"))
      beta = std::numeric_limits<double>::infinity();
    else
      beta = number_at(b, path + ".beta");
    if (!(beta > 0.0)) fail(path + ".beta", "must be > 0 (or \"inf\")");
    return ThermalState{beta};
  } else if (type == "coherent") {
    const double re = opt_number(j, path, "re", 0.0);
    const double im = opt_number(j, path, "im", 0.0);
    return CoherentState{{re, im}};
  }
  fail(path + ".type", "unknown state type '" + type + "'");
}

std::complex<double> parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object()) fail(path, "expected a number or {re, im}");
  return {opt_number(j, path, "re", 0.0), opt_number(j, path, "im", 0.0)};
}

CasimirSettings parse_casimir(const json& j, const std::string& path) {
  CasimirSettings c;
  const std::string geom = req_string(j, path, "geometry");
  if (geom == "interval-1d")
    c.geometry = CavityGeometry::Interval1D;
  else if (geom == "plates-3d")
    c.geometry = CavityGeometry::ParallelPlates3D;
  else
    fail(path + ".geometry", "expected 'interval-1d' or 'plates-3d'");
  c.separation_initial = req_number(j, path, "separation_initial");
  if (!(c.separation_initial > 0.0)) fail(path + ".separation_initial", "must be > 0");
  c.separations = number_list(member(j, path, "separations"), path + ".separations");
  for (std::size_t i = 0; i < c.separations.size(); ++i)
    if (!(c.separations[i] > 0.0))
      fail(path + ".separations[" + std::to_string(i) + "]", "must be > 0");
  c.regulator = opt_number(j, path, "regulator", 0.0);
  c.max_modes = opt_int(j, path, "max_modes", 200000);
  if (c.max_modes < 100) fail(path + ".max_modes", "must be >= 100");
  if (j.contains("beta")) {
    const double beta = number_at(j.at("beta"), path + ".beta");
    if (!(beta > 0.0)) fail(path + ".beta", "must be > 0");
    c.beta = beta;
  }
  return c;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw config_error("config: top level must be an object");

  ScenarioConfig cfg;
  cfg.canonical_text = j.dump();

  if (j.contains("modes")) {
    const json& modes = j.at("modes");
    if (!modes.is_array()) fail("modes", "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const std::string path = "modes[" + std::to_string(i) + "]";
      const json& m = modes[i];
      ModeEntry entry;
      entry.spec.label = m.contains("label") ? req_string(m, path, "label")
                                             : "mode" + std::to_string(i);
      entry.spec.frequency = parse_frequency(member(m, path, "frequency"), path + ".frequency");
      entry.spec.coupling = parse_complex(member(m, path, "coupling"), path + ".coupling");
      entry.state = parse_state(member(m, path, "state"), path + ".state");
      cfg.modes.push_back(std::move(entry));
    }
  }

  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    cfg.protocol.tau = req_number(p, "protocol", "tau");
    if (cfg.protocol.tau < 0.0) fail("protocol.tau", "must be >= 0");
    cfg.protocol.switching =
        parse_switching(member(p, "protocol", "switching"), "protocol.switching");
  } else if (!cfg.modes.empty()) {
    fail("protocol", "missing required field");
  }

  if (j.contains("evaluation")) {
    const json& e = j.at("evaluation");
    cfg.evaluation.t = opt_number(e, "evaluation", "t", cfg.protocol.tau);
    if (cfg.evaluation.t < 0.0) fail("evaluation.t", "must be >= 0");
    if (e.contains("nu_grid")) cfg.evaluation.nu_grid = grid(e.at("nu_grid"), "evaluation.nu_grid");
    if (e.contains("time_grid"))
      cfg.evaluation.time_grid = grid(e.at("time_grid"), "evaluation.time_grid");
    cfg.evaluation.beta = opt_number(e, "evaluation", "beta", 1.0);
    if (!(cfg.evaluation.beta > 0.0)) fail("evaluation.beta", "must be > 0");
    cfg.evaluation.cumulant_order = opt_int(e, "evaluation", "cumulant_order", 3);
    if (cfg.evaluation.cumulant_order < 1 || cfg.evaluation.cumulant_order > 4)
      fail("evaluation.cumulant_order", "must be in 1..4");
    cfg.evaluation.distribution_eps = opt_number(e, "evaluation", "distribution_eps", 1e-10);
    if (!(cfg.evaluation.distribution_eps > 0.0))
      fail("evaluation.distribution_eps", "must be > 0");
    if (e.contains("oracle")) {
      const json& o = e.at("oracle");
      cfg.evaluation.oracle.dim = opt_int(o, "evaluation.oracle", "dim", 128);
      if (cfg.evaluation.oracle.dim < 8) fail("evaluation.oracle.dim", "must be >= 8");
      cfg.evaluation.oracle.dt = opt_number(o, "evaluation.oracle", "dt", 0.0);
      cfg.evaluation.oracle.leak_tol = opt_number(o, "evaluation.oracle", "leak_tol", 1e-10);
      cfg.evaluation.oracle.tolerance = opt_number(o, "evaluation.oracle", "tolerance", 1e-6);
      cfg.evaluation.oracle.tail_eps = opt_number(o, "evaluation.oracle", "tail_eps", 1e-12);
    }
    if (e.contains("casimir"))
      cfg.evaluation.casimir = parse_casimir(e.at("casimir"), "evaluation.casimir");
  } else {
    cfg.evaluation.t = cfg.protocol.tau;
  }
  if (cfg.evaluation.nu_grid.empty()) {
    // default conjugate-variable grid sized to the typical frequency
    for (int i = 0; i < 64; ++i) cfg.evaluation.nu_grid.push_back(-4.0 + 8.0 * i / 63.0);
  }
  if (cfg.evaluation.time_grid.empty()) {
    const double horizon = cfg.evaluation.t > 0.0 ? cfg.evaluation.t : cfg.protocol.tau;
    for (int i = 0; i <= 100; ++i) cfg.evaluation.time_grid.push_back(horizon * i / 100.0);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("format")) {
      cfg.output.format = req_string(o, "output", "format");
      if (cfg.output.format != "csv" && cfg.output.format != "json-lines")
        fail("output.format", "expected 'csv' or 'json-lines'");
    }
    if (o.contains("path")) cfg.output.path = req_string(o, "output", "path");
  }
  cfg.energy_scale = opt_number(j, "config", "energy_scale", 1.0);
  if (!(cfg.energy_scale > 0.0)) fail("energy_scale", "must be > 0");

  if (cfg.modes.empty() && !cfg.evaluation.casimir.has_value())
    fail("modes", "must contain at least one mode (or provide evaluation.casimir)");
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string config_hash(const ScenarioConfig& config) {
  // FNV-1a, 64 bit
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config.canonical_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

}  // namespace qwork
