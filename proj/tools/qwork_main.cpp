#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qwork/commands.hpp"

namespace {

void add_common_flags(CLI::App* cmd, qwork::CommandOptions& opt) {
  cmd->add_option("-c,--config", opt.config_path, "scenario configuration (JSON)");
  cmd->add_option("-o,--out", opt.output_path, "output file path");
  cmd->add_option("--format", opt.format, "output format: csv | json-lines");
  cmd->add_option("--energy-scale", opt.energy_scale,
                  "multiplies every reported energy (default 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact work statistics for driven bosonic modes"};
  app.set_version_flag("--version", std::string("qwork ") + qwork::kToolVersion);
  app.require_subcommand(1);

  qwork::CommandOptions opt;

  CLI::App* drive = app.add_subcommand("drive", "drive functionals table over time");
  add_common_flags(drive, opt);
  drive->add_option("--t", opt.t, "evaluation time");

  CLI::App* cf = app.add_subcommand("cf", "characteristic functions over the nu grid");
  add_common_flags(cf, opt);
  cf->add_option("--t", opt.t, "evaluation time");

  CLI::App* dist = app.add_subcommand("dist", "work distribution atoms");
  add_common_flags(dist, opt);
  dist->add_option("--t", opt.t, "evaluation time");

  CLI::App* weights = app.add_subcommand("weights", "weight-function curves q_s(n, z)");
  add_common_flags(weights, opt);
  weights->add_option("--n", opt.n, "initial occupation (default 3)");
  weights->add_option("--z-max", opt.z_max, "largest rapidity (default 12)");
  weights->add_option("--z-count", opt.z_count, "grid points (default 241)");
  weights->add_option("--s-min", opt.s_min, "smallest s (default -n)");
  weights->add_option("--s-max", opt.s_max, "largest s (default max(3, n))");

  CLI::App* moments = app.add_subcommand("moments", "work moments and cumulants");
  add_common_flags(moments, opt);
  moments->add_option("--t", opt.t, "evaluation time");
  moments->add_option("--order", opt.cumulant_order, "cumulant order 1..4");

  CLI::App* jarzynski = app.add_subcommand("jarzynski", "Jarzynski identity report");
  add_common_flags(jarzynski, opt);
  jarzynski->add_option("--t", opt.t, "evaluation time (must be >= tau)");
  jarzynski->add_option("--beta", opt.beta, "inverse temperature");

  CLI::App* casimir = app.add_subcommand("casimir", "regularized boundary energies");
  add_common_flags(casimir, opt);
  casimir->add_option("--geometry", opt.geometry, "interval-1d | plates-3d");
  casimir->add_option("--d-initial", opt.separation_initial, "initial separation");
  casimir->add_option("--separations", opt.separations, "final separations")->delimiter(',');
  casimir->add_option("--lambda", opt.regulator, "regulator length (0 = auto)");
  casimir->add_option("--max-modes", opt.max_modes, "mode sum cap");
  casimir->add_option("--beta", opt.beta, "inverse temperature for Delta F");

  CLI::App* verify = app.add_subcommand("verify", "closed forms vs the TPM oracle");
  add_common_flags(verify, opt);
  verify->add_option("--t", opt.t, "evaluation time");
  verify->add_option("--dim", opt.dim, "Fock truncation dimension");
  verify->add_option("--dt", opt.dt, "integrator step (0 = auto)");
  verify->add_option("--leak-tol", opt.leak_tol, "truncation leak tolerance");
  verify->add_option("--tol", opt.tolerance, "pass/fail gate on max |dG|");

  CLI11_PARSE(app, argc, argv);

  const std::vector<CLI::App*> picked = app.get_subcommands();
  return qwork::run_command(picked.front()->get_name(), opt, std::cerr);
}
