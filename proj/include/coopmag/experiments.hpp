#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "coopmag/couplings.hpp"
#include "coopmag/dynamics.hpp"
#include "coopmag/params.hpp"

namespace coopmag {

enum class ScenarioKind {
  Couplings,
  Bands,
  Spectrum,
  Dynamics,
  Correlations,
  BathProbe,
};

std::string to_string(ScenarioKind k);
ScenarioKind scenario_kind_from_string(const std::string& s);

enum class SolverKind { Dense, Trajectories };

// One fully resolved run description. Built from a preset plus overrides
// (config file and/or CLI); serializes back to the config format so that a
// dumped config reproduces the run exactly.
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::Dynamics;
  std::string preset_name = "yig-nv";
  BathSpec bath;
  QubitArraySpec qubits;
  Environment env;

  // geometry in units of lambda (preferred over absolute lattice input)
  std::optional<double> a_over_lambda;
  std::optional<std::vector<double>> positions_over_lambda;

  SolverKind solver = SolverKind::Dense;
  int n_traj = 2000;
  double rtol = 1e-8;
  double atol = 1e-10;
  int dense_n_max = 10;
  int traj_n_max = 14;
  double t_max = 5.0;  // units 1/Gamma0
  int n_times = 200;
  CouplingMode j_mode = CouplingMode::Asymptotic;
  std::string initial_state = "all-excited";  // or "ground"

  double xi = 0.0;
  int n_realizations = 1;
  std::uint64_t master_seed = 20260809ull;

  double rho_min = 0.05, rho_max = 3.0;
  int n_rho = 120;

  int n_k = 200;
  long band_n_max = 100000;

  bool sweep = false;
  double sweep_min = 0.2, sweep_max = 5.0;
  int n_sweep = 25;

  std::vector<double> correlation_times;

  std::string probe_channel = "mp";  // mp | pm | zz
  double probe_omega_min = 0.5, probe_omega_max = 1.5;  // units of omega_qi
  int probe_n_omega = 5;
  double probe_k_max = 3.0;  // units of 1/lambda
  int probe_n_k = 200;

  std::string out_dir = "out";

  // Preset + config text (may be empty) resolved into a full config.
  static ScenarioConfig resolve(const std::string& preset_name,
                                const std::string& toml_text,
                                std::optional<ScenarioKind> kind_override);
  std::string to_toml_text() const;

  // Derived helpers.
  DerivedScales scales() const;
  DimensionlessConfig dimensionless(const DerivedScales& s) const;
  std::vector<double> base_positions_over_lambda(
      const DimensionlessConfig& c) const;
};

// 200-point default: zero, then log-spaced through the burst window, then
// linear out to t_max.
std::vector<double> make_time_grid(double t_max, int n);

// Uniform displacements delta_r in (-a*xi/2, a*xi/2) added to the base
// positions (units of lambda); the whole draw is retried (up to 1000 times)
// if any pair lands closer than the minimum separation. Deterministic in
// `seed`. Throws DisorderSamplingExhausted.
std::vector<double> sample_disordered_positions(
    const std::vector<double>& base_positions_over_lambda,
    double a_over_lambda, double xi, std::uint64_t seed);

struct DisorderEnsembleResult {
  DynamicsResult mean;
  std::vector<DynamicsResult> realizations;
  std::vector<std::vector<double>> positions;
};

// Dynamics under positional disorder: n_realizations draws, per-realization
// runs persisted by run_scenario, mean returned. Realization r uses position
// seed derive_seed(master, 2r) and trajectory seed derive_seed(master, 2r+1).
DisorderEnsembleResult run_disorder_ensemble(const ScenarioConfig& cfg);

struct ScenarioOutcome {
  std::vector<std::string> files;  // data files, relative to out_dir
  std::string manifest_path;
};

// Dispatch a scenario, write CSV outputs atomically, then the JSON manifest.
ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

}  // namespace coopmag
