#include "qwork/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <ostream>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "qwork/errors.hpp"
#include "qwork/math.hpp"
#include "qwork/moments.hpp"
#include "qwork/oracle.hpp"
#include "qwork/workdist.hpp"

namespace qwork {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// One table cell: either a label or a number (numbers render with 17
// significant digits so every emitted value reloads exactly).
struct Cell {
  Cell(const char* s) : text(s), is_number(false) {}
  Cell(const std::string& s) : text(s), is_number(false) {}
  Cell(double v) : text(fmt17(v)), number(v), is_number(true) {}
  Cell(int v) : text(std::to_string(v)), number(v), is_number(true) {}
  std::string text;
  double number = 0.0;
  bool is_number;
};

class TableWriter {
 public:
  TableWriter(std::ostream& os, std::string format, std::vector<std::string> columns,
              const std::string& provenance)
      : os_(os), format_(std::move(format)), columns_(std::move(columns)) {
    if (format_ == "csv") {
      os_ << "# " << provenance << "\n";
      for (std::size_t i = 0; i < columns_.size(); ++i)
        os_ << (i ? "," : "") << columns_[i];
      os_ << "\n";
    } else {
      nlohmann::ordered_json meta;
      meta["provenance"] = provenance;
      os_ << meta.dump() << "\n";
    }
  }

  void comment(const std::string& text) {
    if (format_ == "csv") {
      os_ << "# " << text << "\n";
    } else {
      nlohmann::ordered_json j;
      j["note"] = text;
      os_ << j.dump() << "\n";
    }
  }

  void row(const std::vector<Cell>& cells) {
    if (format_ == "csv") {
      for (std::size_t i = 0; i < cells.size(); ++i)
        os_ << (i ? "," : "") << cells[i].text;
      os_ << "\n";
    } else {
      nlohmann::ordered_json j;
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].is_number)
          j[columns_[i]] = cells[i].number;
        else
          j[columns_[i]] = cells[i].text;
      }
      os_ << j.dump() << "\n";
    }
  }

 private:
  std::ostream& os_;
  std::string format_;
  std::vector<std::string> columns_;
};

std::string state_name(const InitialState& state) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        std::ostringstream out;
        if constexpr (std::is_same_v<T, NumberState>) {
          out << "number n=" << s.n;
        } else if constexpr (std::is_same_v<T, ThermalState>) {
          out << "thermal beta=" << s.beta;
        } else {
          out << "coherent " << s.amplitude.real() << (s.amplitude.imag() < 0 ? "-" : "+")
              << std::abs(s.amplitude.imag()) << "i";
        }
        return out.str();
      },
      state);
}

ScenarioConfig load_scenario(const CommandOptions& options, bool allow_bundled) {
  ScenarioConfig cfg;
  if (options.config_path) {
    cfg = parse_scenario_file(*options.config_path);
  } else if (allow_bundled) {
    cfg = parse_scenario_text(default_scenario_json());
  } else {
    throw config_error("config: this subcommand requires --config <file>");
  }
  if (options.t) cfg.evaluation.t = *options.t;
  if (options.beta) cfg.evaluation.beta = *options.beta;
  if (options.energy_scale) {
    if (!(*options.energy_scale > 0.0)) throw config_error("--energy-scale: must be > 0");
    cfg.energy_scale = *options.energy_scale;
  }
  if (options.dim) cfg.evaluation.oracle.dim = *options.dim;
  if (options.dt) cfg.evaluation.oracle.dt = *options.dt;
  if (options.leak_tol) cfg.evaluation.oracle.leak_tol = *options.leak_tol;
  if (options.tolerance) cfg.evaluation.oracle.tolerance = *options.tolerance;
  if (options.cumulant_order) cfg.evaluation.cumulant_order = *options.cumulant_order;
  if (options.format) cfg.output.format = *options.format;
  if (options.output_path) cfg.output.path = *options.output_path;
  if (cfg.output.format != "csv" && cfg.output.format != "json-lines")
    throw config_error("output.format: expected 'csv' or 'json-lines'");
  return cfg;
}

void require_modes(const ScenarioConfig& cfg) {
  if (cfg.modes.empty()) throw config_error("modes: must contain at least one mode");
}

std::string provenance_line(const ScenarioConfig& cfg) {
  return std::string("qwork ") + kToolVersion + " config=" + config_hash(cfg);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("output.path: cannot open '" + path + "' for writing");
  return out;
}

std::string output_path(const ScenarioConfig& cfg, const std::string& subcommand) {
  return cfg.output.path.empty() ? subcommand + ".csv" : cfg.output.path;
}

std::vector<DriveFunctionals> functionals_at(const ScenarioConfig& cfg, double t) {
  std::vector<DriveFunctionals> out;
  out.reserve(cfg.modes.size());
  for (const ModeEntry& m : cfg.modes)
    out.push_back(compute_functionals(m.spec, cfg.protocol, t));
  return out;
}

std::vector<ModeChannel> channels_at(const ScenarioConfig& cfg, double t) {
  std::vector<ModeChannel> out;
  out.reserve(cfg.modes.size());
  for (const ModeEntry& m : cfg.modes)
    out.push_back({m.spec, compute_functionals(m.spec, cfg.protocol, t), m.state});
  return out;
}

// Work distribution of one mode entry.
WorkDistribution distribution_for(const ModeEntry& entry, const DriveFunctionals& f,
                                  double eps) {
  return std::visit(
      [&](const auto& s) -> WorkDistribution {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, NumberState>) {
          return dist_number(f, s.n, eps);
        } else if constexpr (std::is_same_v<T, CoherentState>) {
          return dist_coherent(f, s.amplitude, eps);
        } else {
          if (f.rapidity == 0.0 && std::abs(f.alpha) == 0.0)
            return dist_boundary_thermal(entry.spec, s.beta, f.t, eps);
          return dist_thermal(f, s.beta, eps);
        }
      },
      entry.state);
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

int cmd_drive(const ScenarioConfig& cfg, std::ostream& os) {
  TableWriter w(os, cfg.output.format,
                {"mode", "t", "omega", "switching", "zeta", "xi_re", "xi_im", "alpha_re",
                 "alpha_im", "eta_re", "eta_im", "delta", "theta", "rapidity"},
                provenance_line(cfg));
  const double s = cfg.energy_scale;
  for (const ModeEntry& m : cfg.modes) {
    for (double t : cfg.evaluation.time_grid) {
      const DriveFunctionals f = compute_functionals(m.spec, cfg.protocol, t);
      w.row({m.spec.label, t, s * f.omega_t, evaluate_switching(cfg.protocol, t), f.zeta,
             f.xi.real(), f.xi.imag(), f.alpha.real(), f.alpha.imag(), f.eta.real(),
             f.eta.imag(), s * f.delta, f.theta, f.rapidity});
    }
  }
  return 0;
}

int cmd_cf(const ScenarioConfig& cfg, std::ostream& os) {
  TableWriter w(os, cfg.output.format, {"mode", "nu", "re", "im", "log_re", "log_im"},
                provenance_line(cfg));
  const std::vector<ModeChannel> channels = channels_at(cfg, cfg.evaluation.t);
  const auto& nus = cfg.evaluation.nu_grid;
  std::vector<std::complex<double>> totals(nus.size(), {0.0, 0.0});

  for (const ModeChannel& ch : channels) {
    std::vector<std::complex<double>> values(nus.size());
    for (std::size_t i = 0; i < nus.size(); ++i)
      values[i] = char_state(ch.functionals, ch.state, nus[i]);
    const auto logs = unwrap_log(values);
    for (std::size_t i = 0; i < nus.size(); ++i) {
      totals[i] += logs[i];
      w.row({ch.mode.label, nus[i], values[i].real(), values[i].imag(), logs[i].real(),
             logs[i].imag()});
    }
  }
  std::vector<CharacteristicSample> total_curve(nus.size());
  for (std::size_t i = 0; i < nus.size(); ++i) total_curve[i] = {nus[i], std::exp(totals[i])};
  for (std::size_t i = 0; i < total_curve.size(); ++i) {
    const CharacteristicSample& s = total_curve[i];
    w.row({"total", s.nu, s.value.real(), s.value.imag(), totals[i].real(),
           totals[i].imag()});
  }
  return 0;
}

int cmd_dist(const ScenarioConfig& cfg, std::ostream& os) {
  TableWriter w(os, cfg.output.format, {"mode", "state", "work", "weight"},
                provenance_line(cfg));
  const double s = cfg.energy_scale;
  for (const ModeEntry& m : cfg.modes) {
    const DriveFunctionals f = compute_functionals(m.spec, cfg.protocol, cfg.evaluation.t);
    const WorkDistribution dist =
        distribution_for(m, f, cfg.evaluation.distribution_eps);
    for (const WorkAtom& a : dist.atoms)
      w.row({m.spec.label, dist.state_tag, s * a.work, a.weight});
    std::ostringstream note;
    note << "mode " << m.spec.label << " mass_deficit=" << fmt17(dist.mass_deficit);
    w.comment(note.str());
  }
  return 0;
}

int cmd_weights(const CommandOptions& options, const ScenarioConfig& cfg, std::ostream& os) {
  const int n = options.n.value_or(3);
  if (n < 0) throw config_error("--n: must be >= 0");
  const double z_max = options.z_max.value_or(12.0);
  if (!(z_max >= 0.0)) throw config_error("--z-max: must be >= 0");
  const int z_count = options.z_count.value_or(241);
  if (z_count < 2) throw config_error("--z-count: must be >= 2");
  const int s_min = options.s_min.value_or(-n);
  const int s_max = options.s_max.value_or(std::max(3, n));
  if (s_min < -n) throw config_error("--s-min: must be >= -n");
  if (s_max < s_min) throw config_error("--s-max: must be >= --s-min");

  TableWriter w(os, cfg.output.format, {"s", "z", "q"}, provenance_line(cfg));
  for (int s = s_min; s <= s_max; ++s)
    for (int i = 0; i < z_count; ++i) {
      const double z = z_max * i / (z_count - 1);
      w.row({s, z, weights_number(n, z, s)});
    }
  return 0;
}

int cmd_moments(const ScenarioConfig& cfg, std::ostream& os) {
  TableWriter w(os, cfg.output.format, {"quantity", "value", "error", "method"},
                provenance_line(cfg));
  const double scale = cfg.energy_scale;
  const std::vector<ModeChannel> channels = channels_at(cfg, cfg.evaluation.t);

  double omega_max = 0.0;
  for (const ModeChannel& ch : channels) omega_max = std::max(omega_max, ch.functionals.omega_t);
  const double step = 0.05 / std::max(omega_max, 1e-6);
  auto cf = [&](double nu) { return char_total(channels, nu); };
  const auto cumulants = cumulants_fd(cf, cfg.evaluation.cumulant_order, step);
  for (std::size_t k = 0; k < cumulants.size(); ++k) {
    const double unit = std::pow(scale, static_cast<double>(k + 1));
    w.row({"C" + std::to_string(k + 1), unit * cumulants[k].value, unit * cumulants[k].error,
           "finite-difference"});
  }

  const bool zero_t = std::all_of(channels.begin(), channels.end(), [](const ModeChannel& ch) {
    if (const auto* num = std::get_if<NumberState>(&ch.state)) return num->n == 0;
    if (const auto* th = std::get_if<ThermalState>(&ch.state)) return std::isinf(th->beta);
    return false;
  });
  if (zero_t) {
    std::vector<DriveFunctionals> fs;
    for (const ModeChannel& ch : channels) fs.push_back(ch.functionals);
    const MomentReport report = moments_zero_temperature(fs);
    w.row({"mean", scale * report.mean, 0.0, "analytic"});
    w.row({"variance", scale * scale * report.variance, 0.0, "analytic"});
    w.row({"skewness", scale * scale * scale * report.skewness, 0.0, "analytic"});
  }
  return 0;
}

int cmd_jarzynski(const ScenarioConfig& cfg, std::ostream& os) {
  TableWriter w(os, cfg.output.format,
                {"mode", "beta", "exp_avg", "delta_F", "partition_ratio", "gap"},
                provenance_line(cfg));
  const double beta = cfg.evaluation.beta;
  const double scale = cfg.energy_scale;
  const std::vector<DriveFunctionals> fs = functionals_at(cfg, cfg.evaluation.t);
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const JarzynskiReport r = jarzynski({&fs[i], 1}, beta);
    w.row({cfg.modes[i].spec.label, beta, r.exp_avg, scale * r.delta_F, r.partition_ratio,
           r.gap});
  }
  const JarzynskiReport total = jarzynski(fs, beta);
  w.row({"total", beta, total.exp_avg, scale * total.delta_F, total.partition_ratio,
         total.gap});
  return 0;
}

int cmd_casimir(const CommandOptions& options, ScenarioConfig& cfg, std::ostream& os) {
  if (!cfg.evaluation.casimir && !options.separations)
    throw config_error("evaluation.casimir: required for the casimir subcommand");
  CasimirSettings settings =
      cfg.evaluation.casimir.value_or(CasimirSettings{});
  if (options.geometry) {
    if (*options.geometry == "interval-1d")
      settings.geometry = CavityGeometry::Interval1D;
    else if (*options.geometry == "plates-3d")
      settings.geometry = CavityGeometry::ParallelPlates3D;
    else
      throw config_error("--geometry: expected 'interval-1d' or 'plates-3d'");
  }
  if (options.separation_initial) settings.separation_initial = *options.separation_initial;
  if (options.separations) settings.separations = *options.separations;
  if (options.regulator) settings.regulator = *options.regulator;
  if (options.max_modes) settings.max_modes = *options.max_modes;
  if (options.beta) settings.beta = *options.beta;
  if (settings.separations.empty())
    throw config_error("evaluation.casimir.separations: must be non-empty");

  TableWriter w(os, cfg.output.format, {"geometry", "d", "energy", "delta_F"},
                provenance_line(cfg));
  const char* geom_name =
      settings.geometry == CavityGeometry::Interval1D ? "interval-1d" : "plates-3d";
  const double scale = cfg.energy_scale;
  CavitySpec initial{settings.geometry, settings.separation_initial, settings.regulator,
                     settings.max_modes};
  for (double d : settings.separations) {
    CavitySpec cavity{settings.geometry, d, settings.regulator, settings.max_modes};
    const double energy = casimir_energy(cavity).value;
    const double df = settings.beta ? free_energy_difference(initial, cavity, *settings.beta)
                                    : zero_point_work(initial, cavity);
    w.row({geom_name, d, scale * energy, scale * df});
  }
  return 0;
}

int cmd_verify(const ScenarioConfig& cfg, std::ostream& os, std::ostream& diagnostics) {
  TableWriter w(os, cfg.output.format,
                {"mode", "state", "points", "max_abs_err", "leak", "unitarity_defect",
                 "mass_deficit"},
                provenance_line(cfg));
  const std::vector<VerifyRow> rows = verify_scenario(cfg);
  double worst = 0.0;
  for (const VerifyRow& r : rows) {
    w.row({r.mode, r.state, r.points, r.max_abs_err, r.leak, r.unitarity_defect,
           r.mass_deficit});
    diagnostics << "mode " << r.mode << " [" << r.state << "]: max |dG| = " << r.max_abs_err
                << " over " << r.points << " points\n";
    worst = std::max(worst, r.max_abs_err);
  }
  diagnostics << "verify: max |dG| = " << worst
              << (worst <= cfg.evaluation.oracle.tolerance ? " (PASS)" : " (FAIL)") << "\n";
  return worst <= cfg.evaluation.oracle.tolerance ? 0 : 3;
}

}  // namespace

std::vector<VerifyRow> verify_scenario(const ScenarioConfig& config) {
  const auto& nus = config.evaluation.nu_grid;
  auto run_one = [&](const ModeEntry& entry) {
    VerifyRow row;
    row.mode = entry.spec.label;
    row.state = state_name(entry.state);
    const DriveFunctionals f =
        compute_functionals(entry.spec, config.protocol, config.evaluation.t);
    OracleConfig oracle_cfg{config.evaluation.oracle.dim, config.evaluation.oracle.dt,
                            config.evaluation.oracle.leak_tol};
    const PropagationResult prop =
        propagate(entry.spec, config.protocol, config.evaluation.t, oracle_cfg);
    const WorkDistribution dist = tpm_distribution(prop, entry.spec, config.protocol,
                                                   entry.state, config.evaluation.oracle.tail_eps);
    row.leak = prop.leak;
    row.unitarity_defect = prop.unitarity_defect;
    row.mass_deficit = dist.mass_deficit;
    row.points = static_cast<int>(nus.size());
    for (double nu : nus) {
      const std::complex<double> closed = char_state(f, entry.state, nu);
      const std::complex<double> brute = tpm_charfunc(dist, nu);
      row.max_abs_err = std::max(row.max_abs_err, std::abs(closed - brute));
    }
    return row;
  };

  // independent per-mode jobs; results keep the configured mode order
  std::vector<std::future<VerifyRow>> jobs;
  jobs.reserve(config.modes.size());
  for (const ModeEntry& entry : config.modes)
    jobs.push_back(std::async(std::launch::async, run_one, std::cref(entry)));
  std::vector<VerifyRow> rows;
  rows.reserve(jobs.size());
  for (auto& job : jobs) rows.push_back(job.get());
  return rows;
}

const char* default_scenario_json() {
  return R"({
  "modes": [
    {
      "label": "ramped",
      "frequency": {"type": "tanh", "omega_start": 1.3, "omega_end": 1.9, "center": 2.0, "width": 0.5},
      "coupling": {"re": 0.40, "im": 0.25},
      "state": {"type": "number", "n": 1}
    },
    {
      "label": "fixed",
      "frequency": {"type": "constant", "omega": 1.7},
      "coupling": {"re": 0.35, "im": -0.20},
      "state": {"type": "thermal", "beta": 1.2}
    },
    {
      "label": "linear",
      "frequency": {"type": "linear", "omega_start": 1.1, "omega_end": 1.45, "ramp_time": 3.5},
      "coupling": {"re": 0.30, "im": 0.30},
      "state": {"type": "coherent", "re": 0.8, "im": 0.3}
    }
  ],
  "protocol": {
    "tau": 4.0,
    "switching": {"type": "gaussian", "amplitude": 1.0, "center": 2.0, "width": 0.6}
  },
  "evaluation": {
    "t": 4.5,
    "nu_grid": {"min": -4.0, "max": 4.0, "count": 64},
    "beta": 1.2,
    "cumulant_order": 3,
    "oracle": {"dim": 128, "leak_tol": 1e-10, "tolerance": 1e-6}
  },
  "output": {"format": "csv", "path": ""}
})";
}

int run_command(const std::string& subcommand, const CommandOptions& options,
                std::ostream& diagnostics) {
  try {
    ScenarioConfig cfg;
    const bool casimir_flags_only = subcommand == "casimir" && !options.config_path;
    const bool weights_flags_only = subcommand == "weights" && !options.config_path;
    if (casimir_flags_only || weights_flags_only) {
      cfg = ScenarioConfig{};
      cfg.canonical_text = "{}";
      if (options.format) cfg.output.format = *options.format;
      if (options.output_path) cfg.output.path = *options.output_path;
      if (options.beta) cfg.evaluation.beta = *options.beta;
      if (options.energy_scale) cfg.energy_scale = *options.energy_scale;
    } else {
      cfg = load_scenario(options, subcommand == "verify");
    }

    const std::string path = output_path(cfg, subcommand);
    std::ofstream out = open_output(path);

    int code = 0;
    if (subcommand == "drive") {
      require_modes(cfg);
      code = cmd_drive(cfg, out);
    } else if (subcommand == "cf") {
      require_modes(cfg);
      code = cmd_cf(cfg, out);
    } else if (subcommand == "dist") {
      require_modes(cfg);
      code = cmd_dist(cfg, out);
    } else if (subcommand == "weights") {
      code = cmd_weights(options, cfg, out);
    } else if (subcommand == "moments") {
      require_modes(cfg);
      code = cmd_moments(cfg, out);
    } else if (subcommand == "jarzynski") {
      require_modes(cfg);
      code = cmd_jarzynski(cfg, out);
    } else if (subcommand == "casimir") {
      code = cmd_casimir(options, cfg, out);
    } else if (subcommand == "verify") {
      require_modes(cfg);
      code = cmd_verify(cfg, out, diagnostics);
    } else {
      throw config_error("unknown subcommand '" + subcommand + "'");
    }
    diagnostics << "wrote " << path << "\n";
    return code;
  } catch (const config_error& e) {
    diagnostics << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    diagnostics << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace qwork
