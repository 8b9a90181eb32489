#include "coopmag/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coopmag/bath.hpp"
#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"
#include "coopmag/io.hpp"
#include "coopmag/rng.hpp"
#include "coopmag/spectrum.hpp"
#include "coopmag/version.hpp"
#include "toml.hpp"

namespace coopmag {

namespace {

constexpr double kNmToCm = 1e-7;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "scenario.kind", "scenario.preset",
      "film.stiffness_erg_cm2", "film.spin_density_g2_cm_s",
      "film.gilbert_alpha", "film.gap_erg", "film.gamma_rad_per_s_gauss",
      "film.thickness_nm",
      "transport.sigma", "transport.tau_s", "transport.chi0",
      "qubits.n", "qubits.delta0_ghz", "qubits.gamma_tilde_rad_per_s_gauss",
      "qubits.standoff_nm", "qubits.a_over_lambda", "qubits.a_nm",
      "qubits.positions_over_lambda",
      "environment.temperature_mk", "environment.detuning_mhz",
      "environment.b0_gauss",
      "solver.method", "solver.n_traj", "solver.rtol", "solver.atol",
      "solver.dense_n_max", "solver.traj_n_max", "solver.t_max",
      "solver.n_times", "solver.j_mode", "solver.initial_state",
      "disorder.xi", "disorder.n_realizations", "disorder.master_seed",
      "couplings.rho_min", "couplings.rho_max", "couplings.n_rho",
      "bands.n_k", "bands.n_max",
      "spectrum.sweep", "spectrum.sweep_min", "spectrum.sweep_max",
      "spectrum.n_sweep",
      "correlations.times",
      "bath_probe.channel", "bath_probe.omega_min", "bath_probe.omega_max",
      "bath_probe.n_omega", "bath_probe.k_max", "bath_probe.n_k",
      "output.dir",
  };
  return keys;
}

double get_d(const toml::Table& t, const std::string& k, double dflt) {
  auto it = t.find(k);
  return it == t.end() ? dflt : it->second.as_double();
}
long long get_i(const toml::Table& t, const std::string& k, long long dflt) {
  auto it = t.find(k);
  return it == t.end() ? dflt : it->second.as_int();
}
bool get_b(const toml::Table& t, const std::string& k, bool dflt) {
  auto it = t.find(k);
  return it == t.end() ? dflt : it->second.as_bool();
}
std::string get_s(const toml::Table& t, const std::string& k,
                  const std::string& dflt) {
  auto it = t.find(k);
  return it == t.end() ? dflt : it->second.as_string();
}

}  // namespace

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Couplings: return "couplings";
    case ScenarioKind::Bands: return "bands";
    case ScenarioKind::Spectrum: return "spectrum";
    case ScenarioKind::Dynamics: return "dynamics";
    case ScenarioKind::Correlations: return "correlations";
    case ScenarioKind::BathProbe: return "bath-probe";
  }
  return "dynamics";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "couplings") return ScenarioKind::Couplings;
  if (s == "bands") return ScenarioKind::Bands;
  if (s == "spectrum") return ScenarioKind::Spectrum;
  if (s == "dynamics") return ScenarioKind::Dynamics;
  if (s == "correlations") return ScenarioKind::Correlations;
  if (s == "bath-probe" || s == "bath_probe") return ScenarioKind::BathProbe;
  throw ConfigValidation("unknown scenario kind '" + s + "'");
}

ScenarioConfig ScenarioConfig::resolve(const std::string& preset_name,
                                       const std::string& toml_text,
                                       std::optional<ScenarioKind> kind_override) {
  toml::Table t = toml_text.empty() ? toml::Table{} : toml::parse(toml_text);
  for (const auto& [key, _] : t)
    if (!known_keys().count(key))
      throw ConfigValidation("unknown config key '" + key + "'");

  ScenarioConfig cfg;
  cfg.preset_name = get_s(t, "scenario.preset", preset_name);
  const Preset& p = preset(cfg.preset_name);
  cfg.bath = p.bath;
  cfg.qubits = p.qubits;
  cfg.env = p.env;

  if (kind_override)
    cfg.kind = *kind_override;
  else
    cfg.kind = scenario_kind_from_string(get_s(t, "scenario.kind", "dynamics"));

  cfg.bath.spin_stiffness_D =
      get_d(t, "film.stiffness_erg_cm2", cfg.bath.spin_stiffness_D);
  cfg.bath.surface_spin_density_s =
      get_d(t, "film.spin_density_g2_cm_s", cfg.bath.surface_spin_density_s);
  cfg.bath.gilbert_alpha = get_d(t, "film.gilbert_alpha", cfg.bath.gilbert_alpha);
  cfg.bath.zero_field_gap_K = get_d(t, "film.gap_erg", cfg.bath.zero_field_gap_K);
  cfg.bath.gyromagnetic_gamma =
      get_d(t, "film.gamma_rad_per_s_gauss", cfg.bath.gyromagnetic_gamma);
  cfg.bath.film_thickness_L =
      get_d(t, "film.thickness_nm", cfg.bath.film_thickness_L / kNmToCm) * kNmToCm;
  if (t.count("transport.sigma") || t.count("transport.tau_s") ||
      t.count("transport.chi0")) {
    LongitudinalTransport lt =
        cfg.bath.longitudinal.value_or(LongitudinalTransport{});
    lt.spin_conductivity_sigma = get_d(t, "transport.sigma", lt.spin_conductivity_sigma);
    lt.spin_relaxation_tau_s = get_d(t, "transport.tau_s", lt.spin_relaxation_tau_s);
    lt.static_susceptibility_chi0 = get_d(t, "transport.chi0", lt.static_susceptibility_chi0);
    cfg.bath.longitudinal = lt;
  }

  cfg.qubits.n_qubits = static_cast<int>(get_i(t, "qubits.n", cfg.qubits.n_qubits));
  cfg.qubits.zero_field_splitting_Delta0 =
      kHbar * kTwoPi * 1e9 *
      get_d(t, "qubits.delta0_ghz",
            cfg.qubits.zero_field_splitting_Delta0 / (kHbar * kTwoPi * 1e9));
  cfg.qubits.qubit_gamma_tilde =
      get_d(t, "qubits.gamma_tilde_rad_per_s_gauss", cfg.qubits.qubit_gamma_tilde);
  cfg.qubits.standoff_d =
      get_d(t, "qubits.standoff_nm", cfg.qubits.standoff_d / kNmToCm) * kNmToCm;
  if (t.count("qubits.a_over_lambda"))
    cfg.a_over_lambda = t.at("qubits.a_over_lambda").as_double();
  if (t.count("qubits.a_nm"))
    cfg.qubits.lattice_constant_a = t.at("qubits.a_nm").as_double() * kNmToCm;
  if (t.count("qubits.positions_over_lambda")) {
    cfg.positions_over_lambda =
        t.at("qubits.positions_over_lambda").as_double_array();
    cfg.qubits.n_qubits = static_cast<int>(cfg.positions_over_lambda->size());
  }

  cfg.env.temperature_T =
      1e-3 * get_d(t, "environment.temperature_mk", cfg.env.temperature_T * 1e3);
  if (t.count("environment.b0_gauss")) {
    cfg.env.applied_field_B0 = t.at("environment.b0_gauss").as_double();
    if (!t.count("environment.detuning_mhz")) cfg.env.detuning.reset();
  }
  if (t.count("environment.detuning_mhz"))
    cfg.env.detuning = kTwoPi * 1e6 * t.at("environment.detuning_mhz").as_double();

  const std::string method = get_s(t, "solver.method", "dense");
  if (method == "dense")
    cfg.solver = SolverKind::Dense;
  else if (method == "trajectories")
    cfg.solver = SolverKind::Trajectories;
  else
    throw ConfigValidation("solver.method must be dense|trajectories");
  cfg.n_traj = static_cast<int>(get_i(t, "solver.n_traj", cfg.n_traj));
  cfg.rtol = get_d(t, "solver.rtol", cfg.rtol);
  cfg.atol = get_d(t, "solver.atol", cfg.atol);
  cfg.dense_n_max = static_cast<int>(get_i(t, "solver.dense_n_max", cfg.dense_n_max));
  cfg.traj_n_max = static_cast<int>(get_i(t, "solver.traj_n_max", cfg.traj_n_max));
  cfg.t_max = get_d(t, "solver.t_max", cfg.t_max);
  cfg.n_times = static_cast<int>(get_i(t, "solver.n_times", cfg.n_times));
  const std::string jm = get_s(t, "solver.j_mode", "asymptotic");
  if (jm == "asymptotic")
    cfg.j_mode = CouplingMode::Asymptotic;
  else if (jm == "full")
    cfg.j_mode = CouplingMode::Full;
  else
    throw ConfigValidation("solver.j_mode must be asymptotic|full");
  cfg.initial_state = get_s(t, "solver.initial_state", cfg.initial_state);
  if (cfg.initial_state != "all-excited" && cfg.initial_state != "ground")
    throw ConfigValidation("solver.initial_state must be all-excited|ground");

  cfg.xi = get_d(t, "disorder.xi", cfg.xi);
  if (cfg.xi < 0.0) throw ConfigValidation("disorder.xi must be >= 0");
  cfg.n_realizations =
      static_cast<int>(get_i(t, "disorder.n_realizations", cfg.n_realizations));
  if (cfg.n_realizations < 1)
    throw ConfigValidation("disorder.n_realizations must be >= 1");
  cfg.master_seed = static_cast<std::uint64_t>(
      get_i(t, "disorder.master_seed", static_cast<long long>(cfg.master_seed)));

  cfg.rho_min = get_d(t, "couplings.rho_min", cfg.rho_min);
  cfg.rho_max = get_d(t, "couplings.rho_max", cfg.rho_max);
  cfg.n_rho = static_cast<int>(get_i(t, "couplings.n_rho", cfg.n_rho));

  cfg.n_k = static_cast<int>(get_i(t, "bands.n_k", cfg.n_k));
  cfg.band_n_max = get_i(t, "bands.n_max", cfg.band_n_max);

  cfg.sweep = get_b(t, "spectrum.sweep", cfg.sweep);
  cfg.sweep_min = get_d(t, "spectrum.sweep_min", cfg.sweep_min);
  cfg.sweep_max = get_d(t, "spectrum.sweep_max", cfg.sweep_max);
  cfg.n_sweep = static_cast<int>(get_i(t, "spectrum.n_sweep", cfg.n_sweep));

  if (t.count("correlations.times"))
    cfg.correlation_times = t.at("correlations.times").as_double_array();

  cfg.probe_channel = get_s(t, "bath_probe.channel", cfg.probe_channel);
  if (cfg.probe_channel != "mp" && cfg.probe_channel != "pm" &&
      cfg.probe_channel != "zz")
    throw ConfigValidation("bath_probe.channel must be mp|pm|zz");
  cfg.probe_omega_min = get_d(t, "bath_probe.omega_min", cfg.probe_omega_min);
  cfg.probe_omega_max = get_d(t, "bath_probe.omega_max", cfg.probe_omega_max);
  cfg.probe_n_omega = static_cast<int>(get_i(t, "bath_probe.n_omega", cfg.probe_n_omega));
  cfg.probe_k_max = get_d(t, "bath_probe.k_max", cfg.probe_k_max);
  cfg.probe_n_k = static_cast<int>(get_i(t, "bath_probe.n_k", cfg.probe_n_k));

  cfg.out_dir = get_s(t, "output.dir", cfg.out_dir);
  return cfg;
}

std::string ScenarioConfig::to_toml_text() const {
  toml::Table t;
  t["scenario.kind"] = toml::make_string(to_string(kind));
  t["scenario.preset"] = toml::make_string(preset_name);
  t["film.stiffness_erg_cm2"] = toml::make_double(bath.spin_stiffness_D);
  t["film.spin_density_g2_cm_s"] = toml::make_double(bath.surface_spin_density_s);
  t["film.gilbert_alpha"] = toml::make_double(bath.gilbert_alpha);
  t["film.gap_erg"] = toml::make_double(bath.zero_field_gap_K);
  t["film.gamma_rad_per_s_gauss"] = toml::make_double(bath.gyromagnetic_gamma);
  t["film.thickness_nm"] = toml::make_double(bath.film_thickness_L / kNmToCm);
  if (bath.longitudinal) {
    t["transport.sigma"] = toml::make_double(bath.longitudinal->spin_conductivity_sigma);
    t["transport.tau_s"] = toml::make_double(bath.longitudinal->spin_relaxation_tau_s);
    t["transport.chi0"] = toml::make_double(bath.longitudinal->static_susceptibility_chi0);
  }
  t["qubits.n"] = toml::make_int(qubits.n_qubits);
  t["qubits.delta0_ghz"] = toml::make_double(
      qubits.zero_field_splitting_Delta0 / (kHbar * kTwoPi * 1e9));
  t["qubits.gamma_tilde_rad_per_s_gauss"] = toml::make_double(qubits.qubit_gamma_tilde);
  t["qubits.standoff_nm"] = toml::make_double(qubits.standoff_d / kNmToCm);
  if (a_over_lambda)
    t["qubits.a_over_lambda"] = toml::make_double(*a_over_lambda);
  else
    t["qubits.a_nm"] = toml::make_double(qubits.lattice_constant_a / kNmToCm);
  if (positions_over_lambda)
    t["qubits.positions_over_lambda"] = toml::make_double_array(*positions_over_lambda);
  t["environment.temperature_mk"] = toml::make_double(env.temperature_T * 1e3);
  t["environment.b0_gauss"] = toml::make_double(env.applied_field_B0);
  if (env.detuning)
    t["environment.detuning_mhz"] = toml::make_double(*env.detuning / (kTwoPi * 1e6));
  t["solver.method"] = toml::make_string(solver == SolverKind::Dense ? "dense" : "trajectories");
  t["solver.n_traj"] = toml::make_int(n_traj);
  t["solver.rtol"] = toml::make_double(rtol);
  t["solver.atol"] = toml::make_double(atol);
  t["solver.dense_n_max"] = toml::make_int(dense_n_max);
  t["solver.traj_n_max"] = toml::make_int(traj_n_max);
  t["solver.t_max"] = toml::make_double(t_max);
  t["solver.n_times"] = toml::make_int(n_times);
  t["solver.j_mode"] = toml::make_string(j_mode == CouplingMode::Full ? "full" : "asymptotic");
  t["solver.initial_state"] = toml::make_string(initial_state);
  t["disorder.xi"] = toml::make_double(xi);
  t["disorder.n_realizations"] = toml::make_int(n_realizations);
  t["disorder.master_seed"] = toml::make_int(static_cast<long long>(master_seed));
  t["couplings.rho_min"] = toml::make_double(rho_min);
  t["couplings.rho_max"] = toml::make_double(rho_max);
  t["couplings.n_rho"] = toml::make_int(n_rho);
  t["bands.n_k"] = toml::make_int(n_k);
  t["bands.n_max"] = toml::make_int(band_n_max);
  t["spectrum.sweep"] = toml::make_bool(sweep);
  t["spectrum.sweep_min"] = toml::make_double(sweep_min);
  t["spectrum.sweep_max"] = toml::make_double(sweep_max);
  t["spectrum.n_sweep"] = toml::make_int(n_sweep);
  if (!correlation_times.empty())
    t["correlations.times"] = toml::make_double_array(correlation_times);
  t["bath_probe.channel"] = toml::make_string(probe_channel);
  t["bath_probe.omega_min"] = toml::make_double(probe_omega_min);
  t["bath_probe.omega_max"] = toml::make_double(probe_omega_max);
  t["bath_probe.n_omega"] = toml::make_int(probe_n_omega);
  t["bath_probe.k_max"] = toml::make_double(probe_k_max);
  t["bath_probe.n_k"] = toml::make_int(probe_n_k);
  t["output.dir"] = toml::make_string(out_dir);
  return toml::serialize(t);
}

DerivedScales ScenarioConfig::scales() const {
  return derive_scales(bath, qubits, env);
}

DimensionlessConfig ScenarioConfig::dimensionless(const DerivedScales& s) const {
  QubitArraySpec q = qubits;
  if (a_over_lambda) q.lattice_constant_a = *a_over_lambda * s.lambda;
  if (positions_over_lambda) {
    std::vector<double> abs_pos(positions_over_lambda->size());
    for (size_t i = 0; i < abs_pos.size(); ++i)
      abs_pos[i] = (*positions_over_lambda)[i] * s.lambda;
    q.positions = abs_pos;
    q.n_qubits = static_cast<int>(abs_pos.size());
  }
  return dimensionless_config(s, q);
}

std::vector<double> ScenarioConfig::base_positions_over_lambda(
    const DimensionlessConfig& c) const {
  return c.positions_over_lambda;
}

std::vector<double> make_time_grid(double t_max, int n) {
  if (!(t_max > 0.0)) throw NonPositiveParameter("t_max must be > 0");
  if (n < 3) throw NonPositiveParameter("time grid needs at least 3 points");
  std::vector<double> t;
  t.reserve(n);
  t.push_back(0.0);
  const int n_log = static_cast<int>(std::lround(0.4 * (n - 1)));
  const int n_lin = n - 1 - n_log;
  const double t0 = 1e-3 * t_max;
  const double ts = 0.25 * t_max;
  for (int i = 0; i < n_log; ++i)
    t.push_back(t0 * std::pow(ts / t0, i / (n_log - 1.0)));
  for (int i = 1; i <= n_lin; ++i)
    t.push_back(ts + (t_max - ts) * i / n_lin);
  return t;
}

std::vector<double> sample_disordered_positions(
    const std::vector<double>& base_positions_over_lambda,
    double a_over_lambda, double xi, std::uint64_t seed) {
  if (xi < 0.0) throw NonPositiveParameter("disorder strength must be >= 0");
  const int n = static_cast<int>(base_positions_over_lambda.size());
  Rng rng(seed);
  std::vector<double> pos(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < n; ++i)
      pos[i] = base_positions_over_lambda[i] +
               a_over_lambda * xi * (rng.next_double() - 0.5);
    bool ok = true;
    for (int i = 0; i < n && ok; ++i)
      for (int j = i + 1; j < n && ok; ++j)
        if (std::abs(pos[i] - pos[j]) < kMinSeparationOverLambda) ok = false;
    if (ok) return pos;
  }
  throw DisorderSamplingExhausted(
      "could not draw positions above the minimum separation in 1000 tries");
}

namespace {

DynamicsResult run_dynamics_once(const ScenarioConfig& cfg,
                                 const DimensionlessConfig& dcfg,
                                 const std::vector<double>& positions,
                                 const std::vector<double>& t_grid,
                                 std::uint64_t traj_seed,
                                 bool with_correlations) {
  const CouplingMatrices mats =
      build_coupling_matrices(positions, dcfg, cfg.j_mode);
  const LindbladModel model = LindbladModel::from_couplings(mats);
  const int n = model.n;
  if (cfg.solver == SolverKind::Dense) {
    EvolveOptions opts;
    opts.rtol = cfg.rtol;
    opts.atol = cfg.atol;
    opts.dense_n_max = cfg.dense_n_max;
    opts.with_correlations = with_correlations;
    opts.correlation_times = cfg.correlation_times;
    const Eigen::MatrixXcd rho0 = cfg.initial_state == "ground"
                                      ? Eigen::MatrixXcd(thermal_product_density(n, 0.0))
                                      : all_excited_density(n);
    return evolve_density_matrix(rho0, model, t_grid, opts);
  }
  TrajectoryOptions opts;
  opts.rtol = cfg.rtol;
  opts.atol = cfg.atol;
  opts.n_traj = cfg.n_traj;
  opts.master_seed = traj_seed;
  opts.n_max = cfg.traj_n_max;
  opts.with_correlations = with_correlations;
  opts.correlation_times = cfg.correlation_times;
  Eigen::VectorXcd psi0;
  if (cfg.initial_state == "ground") {
    psi0 = Eigen::VectorXcd::Zero(1 << n);
    psi0(0) = 1.0;
  } else {
    psi0 = all_excited_state(n);
  }
  return run_trajectories(psi0, model, t_grid, opts);
}

}  // namespace

DisorderEnsembleResult run_disorder_ensemble(const ScenarioConfig& cfg) {
  const DerivedScales s = cfg.scales();
  const DimensionlessConfig dcfg = cfg.dimensionless(s);
  const std::vector<double> base = cfg.base_positions_over_lambda(dcfg);
  const std::vector<double> t_grid = make_time_grid(cfg.t_max, cfg.n_times);

  DisorderEnsembleResult out;
  for (int r = 0; r < cfg.n_realizations; ++r) {
    const std::vector<double> pos = sample_disordered_positions(
        base, dcfg.a_over_lambda, cfg.xi, derive_seed(cfg.master_seed, 2 * r));
    out.positions.push_back(pos);
    out.realizations.push_back(
        run_dynamics_once(cfg, dcfg, pos, t_grid,
                          derive_seed(cfg.master_seed, 2 * r + 1), false));
  }

  const int n = static_cast<int>(base.size());
  const int nt = static_cast<int>(t_grid.size());
  DynamicsResult& mean = out.mean;
  mean.t = t_grid;
  mean.sigma_z = Eigen::MatrixXd::Zero(n, nt);
  mean.sum_sigma_z.assign(nt, 0.0);
  mean.emission_rate.assign(nt, 0.0);
  for (const DynamicsResult& r : out.realizations) {
    mean.sigma_z += r.sigma_z;
    for (int i = 0; i < nt; ++i) {
      mean.sum_sigma_z[i] += r.sum_sigma_z[i];
      mean.emission_rate[i] += r.emission_rate[i];
    }
  }
  mean.sigma_z /= cfg.n_realizations;
  for (int i = 0; i < nt; ++i) {
    mean.sum_sigma_z[i] /= cfg.n_realizations;
    mean.emission_rate[i] /= cfg.n_realizations;
  }
  return out;
}

// --------------------------------------------------------------------------
// scenario runners

namespace {

std::string csv_header(const ScenarioConfig& cfg, const DerivedScales& s,
                       const std::string& columns) {
  std::ostringstream os;
  os << "# " << kToolName << " " << kToolVersion << " " << to_string(cfg.kind)
     << "\n";
  os << "# nu_per_s = " << format_double(s.nu)
     << "  gamma0_over_nu = " << format_double(s.gamma0_over_nu)
     << "  gamma0_per_s = " << format_double(s.gamma0_abs) << "\n";
  os << "# lambda_nm = " << format_double(s.lambda / kNmToCm)
     << "  lambda_prime_nm = " << format_double(s.lambda_prime / kNmToCm)
     << "  lambda_exc_nm = " << format_double(s.lambda_exc / kNmToCm) << "\n";
  os << "# " << columns << "\n";
  os << columns << "\n";
  return os.str();
}

std::string run_couplings_csv(const ScenarioConfig& cfg,
                              const DerivedScales& s,
                              const DimensionlessConfig& dcfg) {
  if (!(cfg.rho_min > 0.0) || !(cfg.rho_max > cfg.rho_min) || cfg.n_rho < 2)
    throw ConfigValidation("couplings grid needs 0 < rho_min < rho_max, n_rho >= 2");
  std::ostringstream os;
  os << csv_header(cfg, s,
                   "rho_over_lambda,J_full,J_asymptotic,Jz,Gamma,GammaTilde");
  for (int i = 0; i < cfg.n_rho; ++i) {
    const double rho =
        cfg.rho_min + (cfg.rho_max - cfg.rho_min) * i / (cfg.n_rho - 1.0);
    os << format_double(rho) << ','
       << format_double(coupling_j(rho, dcfg, CouplingMode::Full)) << ','
       << format_double(coupling_j(rho, dcfg, CouplingMode::Asymptotic)) << ','
       << format_double(coupling_jz(rho, dcfg)) << ','
       << format_double(coupling_gamma(rho, dcfg)) << ','
       << format_double(coupling_gamma_tilde(rho, dcfg)) << "\n";
  }
  return os.str();
}

std::string run_bands_csv(const ScenarioConfig& cfg, const DerivedScales& s,
                          const DimensionlessConfig& dcfg) {
  if (cfg.n_k < 2 || cfg.band_n_max < 1)
    throw ConfigValidation("bands need n_k >= 2 and n_max >= 1");
  const double a_over_lambda = dcfg.a_over_lambda;
  const double g0 = dcfg.gamma0_over_nu;
  std::ostringstream os;
  os << csv_header(cfg, s, "k_a_over_pi,J_k_over_gamma0,Gamma_k_over_gamma0,method");
  for (int i = 0; i < cfg.n_k; ++i) {
    const double ka = -kPi + kTwoPi * (i + 0.5) / cfg.n_k;
    const BandPoint p = band_structure_sum(ka, a_over_lambda, dcfg, cfg.band_n_max);
    os << format_double(ka / kPi) << ',' << format_double(p.J_k / g0) << ','
       << format_double(p.Gamma_k / g0) << ",sum\n";
    try {
      const double gp = band_structure_poisson(ka, a_over_lambda, dcfg);
      os << format_double(ka / kPi) << ',' << format_double(p.J_k / g0) << ','
         << format_double(gp / g0) << ",poisson\n";
    } catch (const SingularPoint&) {
      // band-edge singularity: the closed form has no value at this k
    }
  }
  return os.str();
}

std::string run_spectrum_csv(const ScenarioConfig& cfg, const DerivedScales& s,
                             const DimensionlessConfig& dcfg) {
  std::ostringstream os;
  os << csv_header(cfg, s,
                   "a_over_lambda,mode_index,re_e_over_gamma0,gamma_m_over_gamma0");
  const double g0 = dcfg.gamma0_over_nu;
  std::vector<double> sweep_values;
  if (cfg.sweep) {
    if (cfg.n_sweep < 2 || !(cfg.sweep_max > cfg.sweep_min) || !(cfg.sweep_min > 0))
      throw ConfigValidation("spectrum sweep needs 0 < sweep_min < sweep_max, n_sweep >= 2");
    for (int i = 0; i < cfg.n_sweep; ++i)
      sweep_values.push_back(cfg.sweep_min + (cfg.sweep_max - cfg.sweep_min) *
                                                 i / (cfg.n_sweep - 1.0));
  } else {
    sweep_values.push_back(dcfg.a_over_lambda);
  }
  const int n = cfg.qubits.n_qubits;
  for (double al : sweep_values) {
    std::vector<double> pos(n);
    if (!cfg.sweep && cfg.positions_over_lambda) {
      pos = *cfg.positions_over_lambda;
    } else {
      for (int i = 0; i < n; ++i) pos[i] = i * al;
    }
    const CouplingMatrices mats = build_coupling_matrices(pos, dcfg, cfg.j_mode);
    const SingleExcitationSpectrum sp =
        single_excitation_modes(effective_hamiltonian(mats));
    for (int m = 0; m < static_cast<int>(sp.eigenvalues.size()); ++m) {
      os << format_double(al) << ',' << m + 1 << ','
         << format_double(sp.eigenvalues(m).real() / g0) << ','
         << format_double(-sp.eigenvalues(m).imag() / g0) << "\n";
    }
  }
  return os.str();
}

std::string dynamics_csv(const ScenarioConfig& cfg, const DerivedScales& s,
                         const DynamicsResult& r) {
  const int n = static_cast<int>(r.sigma_z.rows());
  std::ostringstream cols;
  cols << "t_gamma0,emission_rate_over_gamma0,sum_sigma_z";
  for (int a = 0; a < n; ++a) cols << ",sigma_z_" << a;
  const bool stochastic = r.trajectory_count > 0;
  if (stochastic) {
    cols << ",emission_rate_stderr,sum_sigma_z_stderr";
    for (int a = 0; a < n; ++a) cols << ",sigma_z_stderr_" << a;
  }
  std::ostringstream os;
  os << csv_header(cfg, s, cols.str());
  for (size_t i = 0; i < r.t.size(); ++i) {
    os << format_double(r.t[i]) << ',' << format_double(r.emission_rate[i])
       << ',' << format_double(r.sum_sigma_z[i]);
    for (int a = 0; a < n; ++a) os << ',' << format_double(r.sigma_z(a, i));
    if (stochastic) {
      os << ',' << format_double(r.emission_rate_stderr[i]) << ','
         << format_double(r.sum_sigma_z_stderr[i]);
      for (int a = 0; a < n; ++a)
        os << ',' << format_double(r.sigma_z_stderr(a, i));
    }
    os << "\n";
  }
  return os.str();
}

std::string correlations_csv(const ScenarioConfig& cfg, const DerivedScales& s,
                             const DynamicsResult& r) {
  std::ostringstream os;
  os << csv_header(cfg, s, "t_gamma0,alpha,beta,c_alpha_beta");
  for (const auto& [t, c] : r.correlations) {
    for (int a = 0; a < c.rows(); ++a)
      for (int b = 0; b < c.cols(); ++b)
        os << format_double(t) << ',' << a << ',' << b << ','
           << format_double(c(a, b)) << "\n";
  }
  return os.str();
}

std::string run_bath_probe_csv(const ScenarioConfig& cfg,
                               const DerivedScales& s) {
  if (cfg.probe_n_omega < 1 || cfg.probe_n_k < 2)
    throw ConfigValidation("bath probe needs n_omega >= 1 and n_k >= 2");
  std::ostringstream os;
  os << csv_header(cfg, s, "omega_rad_per_s,k_per_cm,re,im,channel");
  for (int io = 0; io < cfg.probe_n_omega; ++io) {
    const double f = cfg.probe_n_omega == 1
                         ? cfg.probe_omega_min
                         : cfg.probe_omega_min +
                               (cfg.probe_omega_max - cfg.probe_omega_min) *
                                   io / (cfg.probe_n_omega - 1.0);
    const double omega = f * s.omega_qi;
    for (int ik = 0; ik < cfg.probe_n_k; ++ik) {
      const double k = cfg.probe_k_max * ik / (cfg.probe_n_k - 1.0) / s.lambda;
      std::complex<double> v;
      if (cfg.probe_channel == "mp")
        v = chi_minus_plus(omega, k, cfg.bath, s);
      else if (cfg.probe_channel == "pm")
        v = chi_plus_minus(omega, k, cfg.bath, s);
      else
        v = chi_zz(omega, k, cfg.bath);
      os << format_double(omega) << ',' << format_double(k) << ','
         << format_double(v.real()) << ',' << format_double(v.imag()) << ','
         << cfg.probe_channel << "\n";
    }
  }
  return os.str();
}

nlohmann::json scales_json(const DerivedScales& s) {
  nlohmann::json j;
  auto put = [&j](const char* k, double v) {
    if (std::isfinite(v))
      j[k] = v;
    else
      j[k] = v > 0 ? "inf" : "-inf";
  };
  put("omega_qi_rad_per_s", s.omega_qi);
  put("gap_delta_f_rad_per_s", s.gap_DeltaF);
  put("detuning_ratio", s.detuning_ratio);
  put("sum_ratio", s.sum_ratio);
  put("gap_ratio", s.gap_ratio);
  put("lambda_cm", s.lambda);
  put("lambda_prime_cm", s.lambda_prime);
  put("lambda_exc_cm", s.lambda_exc);
  put("nu_per_s", s.nu);
  put("d_over_lambda", s.d_over_lambda);
  put("d_over_lambda_prime", s.d_over_lambda_prime);
  put("d_over_lambda_exc", s.d_over_lambda_exc);
  put("n_bose", s.n_bose);
  put("beta_hbar_omega", s.beta_hbar_omega);
  put("gamma0_over_nu", s.gamma0_over_nu);
  put("gamma0_per_s", s.gamma0_abs);
  return j;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  const auto t_start = std::chrono::steady_clock::now();
  ensure_directory(cfg.out_dir);
  const DerivedScales s = cfg.scales();
  const DimensionlessConfig dcfg = cfg.dimensionless(s);

  ScenarioOutcome outcome;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file_atomic(cfg.out_dir + "/" + name, content);
    outcome.files.push_back(name);
  };

  switch (cfg.kind) {
    case ScenarioKind::Couplings:
      emit("couplings.csv", run_couplings_csv(cfg, s, dcfg));
      break;
    case ScenarioKind::Bands:
      emit("bands.csv", run_bands_csv(cfg, s, dcfg));
      break;
    case ScenarioKind::Spectrum:
      emit("spectrum.csv", run_spectrum_csv(cfg, s, dcfg));
      break;
    case ScenarioKind::Dynamics: {
      if (cfg.xi > 0.0 || cfg.n_realizations > 1) {
        const DisorderEnsembleResult ens = run_disorder_ensemble(cfg);
        for (int r = 0; r < static_cast<int>(ens.realizations.size()); ++r) {
          char name[64];
          std::snprintf(name, sizeof(name), "dynamics_r%03d.csv", r);
          emit(name, dynamics_csv(cfg, s, ens.realizations[r]));
        }
        emit("dynamics_mean.csv", dynamics_csv(cfg, s, ens.mean));
      } else {
        const std::vector<double> t_grid = make_time_grid(cfg.t_max, cfg.n_times);
        const DynamicsResult r = run_dynamics_once(
            cfg, dcfg, cfg.base_positions_over_lambda(dcfg), t_grid,
            derive_seed(cfg.master_seed, 1), false);
        emit("dynamics.csv", dynamics_csv(cfg, s, r));
      }
      break;
    }
    case ScenarioKind::Correlations: {
      const std::vector<double> t_grid = make_time_grid(cfg.t_max, cfg.n_times);
      ScenarioConfig c2 = cfg;
      if (c2.correlation_times.empty())
        c2.correlation_times = {0.0, 0.2, 0.5, 1.0, 2.0, cfg.t_max};
      const DynamicsResult r = run_dynamics_once(
          c2, dcfg, c2.base_positions_over_lambda(dcfg), t_grid,
          derive_seed(cfg.master_seed, 1), true);
      emit("dynamics.csv", dynamics_csv(cfg, s, r));
      emit("correlations.csv", correlations_csv(cfg, s, r));
      break;
    }
    case ScenarioKind::BathProbe:
      emit("bath_probe.csv", run_bath_probe_csv(cfg, s));
      break;
  }

  // Manifest written last, after all data files are durable.
  nlohmann::json manifest;
  manifest["tool"] = kToolName;
  manifest["version"] = kToolVersion;
  manifest["kind"] = to_string(cfg.kind);
  manifest["preset"] = cfg.preset_name;
  manifest["master_seed"] = cfg.master_seed;
  manifest["config_toml"] = cfg.to_toml_text();
  manifest["scales"] = scales_json(s);
  nlohmann::json files = nlohmann::json::array();
  for (const std::string& name : outcome.files) {
    const std::string path = cfg.out_dir + "/" + name;
    files.push_back({{"name", name},
                     {"bytes", file_size(path)},
                     {"fnv1a64", to_hex(fnv1a64_file(path))}});
  }
  manifest["files"] = files;
  manifest["wall_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - t_start)
          .count();
  outcome.manifest_path = cfg.out_dir + "/manifest.json";
  write_file_atomic(outcome.manifest_path, manifest.dump(2) + "\n");
  return outcome;
}

}  // namespace coopmag
