#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coopmag/errors.hpp"
#include "coopmag/experiments.hpp"
#include "coopmag/io.hpp"
#include "coopmag/version.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string preset = "yig-nv";
  std::string out_dir;
  bool dump_config = false;

  std::optional<int> n;
  std::optional<double> a_over_lambda;
  std::optional<double> standoff_nm;
  std::optional<double> temperature_mk;
  std::optional<double> detuning_mhz;
  std::optional<double> b0_gauss;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> solver;
  std::optional<int> n_traj;
  std::optional<std::string> j_mode;
  std::optional<double> t_max;
  std::optional<int> n_times;
  std::optional<double> xi;
  std::optional<int> n_realizations;
  std::optional<double> rho_min, rho_max;
  std::optional<int> n_rho;
  std::optional<int> n_k;
  std::optional<long> band_n_max;
  bool sweep = false;
  std::optional<double> sweep_min, sweep_max;
  std::optional<int> n_sweep;
  std::optional<std::string> probe_channel;
};

void add_common_options(CLI::App* sub, CliOverrides& o) {
  sub->add_option("--config", o.config_path, "Run configuration file (TOML)");
  sub->add_option("--preset", o.preset, "Named parameter preset")
      ->default_val("yig-nv");
  sub->add_option("--out", o.out_dir, "Output directory");
  sub->add_option("--seed", o.seed, "Master seed (decimal, < 2^63)");
  sub->add_flag("--dump-config", o.dump_config,
                "Print the fully resolved configuration and exit");
  sub->add_option("--n", o.n, "Number of qubits");
  sub->add_option("--a-over-lambda", o.a_over_lambda,
                  "Lattice constant in units of lambda");
  sub->add_option("--d-nm", o.standoff_nm, "Film-to-array distance [nm]");
  sub->add_option("--temperature-mk", o.temperature_mk, "Temperature [mK]");
  sub->add_option("--detuning-mhz", o.detuning_mhz,
                  "Qubit-gap detuning [MHz] (primary knob)");
  sub->add_option("--b0-gauss", o.b0_gauss,
                  "Applied field [G]; sets the gap unless a detuning is given");
  sub->add_option("--solver", o.solver, "dense | trajectories");
  sub->add_option("--n-traj", o.n_traj, "Trajectory count");
  sub->add_option("--j-mode", o.j_mode, "asymptotic | full coherent coupling");
  sub->add_option("--t-max", o.t_max, "Evolution horizon [1/Gamma0]");
  sub->add_option("--n-times", o.n_times, "Output grid size");
  sub->add_option("--xi", o.xi, "Positional disorder strength");
  sub->add_option("--n-realizations", o.n_realizations,
                  "Disorder realizations to average");
  sub->add_option("--rho-min", o.rho_min, "Coupling scan start [lambda]");
  sub->add_option("--rho-max", o.rho_max, "Coupling scan end [lambda]");
  sub->add_option("--n-rho", o.n_rho, "Coupling scan points");
  sub->add_option("--n-k", o.n_k, "Brillouin-zone grid size");
  sub->add_option("--band-n-max", o.band_n_max, "Lattice-sum truncation order");
  sub->add_flag("--sweep", o.sweep, "Sweep a/lambda (spectrum)");
  sub->add_option("--sweep-min", o.sweep_min, "Sweep start");
  sub->add_option("--sweep-max", o.sweep_max, "Sweep end");
  sub->add_option("--n-sweep", o.n_sweep, "Sweep points");
  sub->add_option("--channel", o.probe_channel, "Bath probe channel: mp|pm|zz");
}

coopmag::ScenarioConfig build_config(coopmag::ScenarioKind kind,
                                     const CliOverrides& o) {
  using namespace coopmag;
  const std::string text =
      o.config_path.empty() ? std::string{} : read_file(o.config_path);
  ScenarioConfig cfg = ScenarioConfig::resolve(o.preset, text, kind);

  if (o.n) cfg.qubits.n_qubits = *o.n;
  if (o.a_over_lambda) cfg.a_over_lambda = *o.a_over_lambda;
  if (o.standoff_nm) cfg.qubits.standoff_d = *o.standoff_nm * 1e-7;
  if (o.temperature_mk) cfg.env.temperature_T = *o.temperature_mk * 1e-3;
  if (o.b0_gauss) {
    cfg.env.applied_field_B0 = *o.b0_gauss;
    if (!o.detuning_mhz) cfg.env.detuning.reset();
  }
  if (o.detuning_mhz) cfg.env.detuning = 2.0 * M_PI * 1e6 * *o.detuning_mhz;
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.solver) {
    if (*o.solver == "dense")
      cfg.solver = SolverKind::Dense;
    else if (*o.solver == "trajectories")
      cfg.solver = SolverKind::Trajectories;
    else
      throw ConfigValidation("--solver must be dense|trajectories");
  }
  if (o.n_traj) cfg.n_traj = *o.n_traj;
  if (o.j_mode) {
    if (*o.j_mode == "asymptotic")
      cfg.j_mode = CouplingMode::Asymptotic;
    else if (*o.j_mode == "full")
      cfg.j_mode = CouplingMode::Full;
    else
      throw ConfigValidation("--j-mode must be asymptotic|full");
  }
  if (o.t_max) cfg.t_max = *o.t_max;
  if (o.n_times) cfg.n_times = *o.n_times;
  if (o.xi) cfg.xi = *o.xi;
  if (o.n_realizations) cfg.n_realizations = *o.n_realizations;
  if (o.rho_min) cfg.rho_min = *o.rho_min;
  if (o.rho_max) cfg.rho_max = *o.rho_max;
  if (o.n_rho) cfg.n_rho = *o.n_rho;
  if (o.n_k) cfg.n_k = *o.n_k;
  if (o.band_n_max) cfg.band_n_max = *o.band_n_max;
  if (o.sweep) cfg.sweep = true;
  if (o.sweep_min) cfg.sweep_min = *o.sweep_min;
  if (o.sweep_max) cfg.sweep_max = *o.sweep_max;
  if (o.n_sweep) cfg.n_sweep = *o.n_sweep;
  if (o.probe_channel) cfg.probe_channel = *o.probe_channel;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  return cfg;
}

int run(coopmag::ScenarioKind kind, const CliOverrides& o) {
  using namespace coopmag;
  const ScenarioConfig cfg = build_config(kind, o);
  for (const std::string& w : parameter_warnings(cfg.bath))
    std::cerr << "warning: " << w << "\n";
  if (o.dump_config) {
    std::cout << cfg.to_toml_text();
    return 0;
  }
  const ScenarioOutcome out = run_scenario(cfg);
  for (const std::string& f : out.files)
    std::cout << cfg.out_dir << "/" << f << "\n";
  std::cout << out.manifest_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative magnon-mediated dynamics of a spin-qubit array"};
  app.set_version_flag("--version",
                       std::string(coopmag::kToolName) + " " +
                           coopmag::kToolVersion);
  app.require_subcommand(1);

  struct Sub {
    coopmag::ScenarioKind kind;
    CliOverrides overrides;
    CLI::App* cmd;
  };
  std::vector<Sub> subs;
  subs.push_back({coopmag::ScenarioKind::Couplings, {},
                  app.add_subcommand("couplings", "Pairwise coupling scan")});
  subs.push_back({coopmag::ScenarioKind::Bands, {},
                  app.add_subcommand("bands", "Infinite-chain band structure")});
  subs.push_back({coopmag::ScenarioKind::Spectrum, {},
                  app.add_subcommand("spectrum", "Finite-chain decay spectrum")});
  subs.push_back({coopmag::ScenarioKind::Dynamics, {},
                  app.add_subcommand("dynamics", "Many-body relaxation dynamics")});
  subs.push_back({coopmag::ScenarioKind::Correlations, {},
                  app.add_subcommand("correlations",
                                     "Two-point excitation correlations")});
  subs.push_back({coopmag::ScenarioKind::BathProbe, {},
                  app.add_subcommand("bath-probe", "Film susceptibility scan")});
  for (Sub& s : subs) add_common_options(s.cmd, s.overrides);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    for (const Sub& s : subs)
      if (s.cmd->parsed()) return run(s.kind, s.overrides);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const coopmag::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
