#include "coopmag/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"

namespace coopmag {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be strictly positive (got " << v << ")";
    throw NonPositiveParameter(os.str());
  }
}

void require_nonnegative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be >= 0 (got " << v << ")";
    throw NonPositiveParameter(os.str());
  }
}

}  // namespace

double LongitudinalTransport::diffusion_length() const {
  return std::sqrt(spin_conductivity_sigma * spin_relaxation_tau_s /
                   static_susceptibility_chi0);
}

void LongitudinalTransport::validate() const {
  require_positive(spin_conductivity_sigma, "spin_conductivity_sigma");
  require_positive(spin_relaxation_tau_s, "spin_relaxation_tau_s");
  require_positive(static_susceptibility_chi0, "static_susceptibility_chi0");
  if (!std::isfinite(diffusion_length()))
    throw NonPositiveParameter("spin diffusion length is not finite");
}

void BathSpec::validate() const {
  require_positive(spin_stiffness_D, "spin_stiffness_D");
  require_positive(surface_spin_density_s, "surface_spin_density_s");
  require_positive(gilbert_alpha, "gilbert_alpha");
  if (!(gilbert_alpha < 1.0))
    throw NonPositiveParameter("gilbert_alpha must be << 1");
  require_nonnegative(zero_field_gap_K, "zero_field_gap_K");
  require_positive(gyromagnetic_gamma, "gyromagnetic_gamma");
  if (longitudinal) longitudinal->validate();
}

void QubitArraySpec::validate() const {
  if (n_qubits < 1) throw NonPositiveParameter("n_qubits must be >= 1");
  require_positive(lattice_constant_a, "lattice_constant_a");
  require_positive(standoff_d, "standoff_d");
  require_positive(zero_field_splitting_Delta0, "zero_field_splitting_Delta0");
  require_positive(qubit_gamma_tilde, "qubit_gamma_tilde");
  if (positions) {
    if (static_cast<int>(positions->size()) != n_qubits)
      throw DimensionMismatch("explicit positions must have n_qubits entries");
    for (size_t i = 1; i < positions->size(); ++i)
      if (!((*positions)[i] > (*positions)[i - 1]))
        throw NonPositiveParameter("explicit positions must be strictly increasing");
  }
}

void Environment::validate() const {
  require_nonnegative(applied_field_B0, "applied_field_B0");
  require_nonnegative(temperature_T, "temperature_T");
  if (detuning && !(std::isfinite(*detuning)))
    throw NonPositiveParameter("detuning must be finite");
}

std::vector<std::string> parameter_warnings(const BathSpec& bath) {
  std::vector<std::string> w;
  if (bath.gilbert_alpha > 0.05) {
    std::ostringstream os;
    os << "gilbert_alpha = " << bath.gilbert_alpha
       << " is large; the weak-damping closures assume alpha << 1";
    w.push_back(os.str());
  }
  return w;
}

DerivedScales derive_scales(const BathSpec& bath, const QubitArraySpec& qubits,
                            const Environment& env) {
  bath.validate();
  qubits.validate();
  env.validate();

  DerivedScales s;
  const double delta0 = qubits.zero_field_splitting_Delta0 / kHbar;  // rad/s
  s.omega_qi = delta0 - qubits.qubit_gamma_tilde * env.applied_field_B0;
  if (!(s.omega_qi > 0.0))
    throw NonPositiveParameter("qubit frequency driven non-positive by B0");

  if (env.detuning) {
    // Detuning as the primary knob: place the gap right below the qubit line.
    if (!(*env.detuning > 0.0))
      throw GapExceedsQubitFrequency(
          "detuning must be > 0 for the transverse emission channel");
    s.gap_DeltaF = s.omega_qi - *env.detuning;
  } else {
    s.gap_DeltaF = bath.zero_field_gap_K / kHbar +
                   bath.gyromagnetic_gamma * env.applied_field_B0;
  }
  if (!(s.gap_DeltaF > 0.0))
    throw NonPositiveParameter("spin-wave gap must be strictly positive");

  const double detuning = s.omega_qi - s.gap_DeltaF;
  if (!(detuning > 0.0))
    throw GapExceedsQubitFrequency(
        "omega_qi <= Delta_F: no real-magnon emission channel");

  s.detuning_ratio = detuning / delta0;
  s.sum_ratio = (s.omega_qi + s.gap_DeltaF) / delta0;
  s.gap_ratio = s.gap_DeltaF / delta0;

  const double D = bath.spin_stiffness_D;
  s.lambda = std::sqrt(D / (kHbar * detuning));
  s.lambda_prime = std::sqrt(D / (kHbar * (s.omega_qi + s.gap_DeltaF)));
  s.lambda_exc = std::sqrt(D / (kHbar * s.gap_DeltaF));

  const double gg = bath.gyromagnetic_gamma * qubits.qubit_gamma_tilde;
  s.nu = kPi * kHbar * kHbar * gg * gg * bath.surface_spin_density_s *
         qubits.zero_field_splitting_Delta0 / (D * D);

  s.d_over_lambda = qubits.standoff_d / s.lambda;
  s.d_over_lambda_prime = qubits.standoff_d / s.lambda_prime;
  s.d_over_lambda_exc = qubits.standoff_d / s.lambda_exc;

  if (env.temperature_T > 0.0) {
    s.beta_hbar_omega = kHbar * s.omega_qi / (kBoltzmann * env.temperature_T);
    s.n_bose = 1.0 / std::expm1(s.beta_hbar_omega);
  } else {
    s.beta_hbar_omega = std::numeric_limits<double>::infinity();
    s.n_bose = 0.0;
  }

  s.gamma0_over_nu = (kPi / 4.0) * (s.n_bose + 1.0) * s.detuning_ratio *
                     std::exp(-2.0 * s.d_over_lambda);
  s.gamma0_abs = s.gamma0_over_nu * s.nu;
  return s;
}

DimensionlessConfig dimensionless_config(const DerivedScales& scales,
                                         const QubitArraySpec& qubits) {
  qubits.validate();
  DimensionlessConfig c;
  c.a_over_lambda = qubits.lattice_constant_a / scales.lambda;
  c.d_over_lambda = scales.d_over_lambda;
  c.d_over_lambda_prime = scales.d_over_lambda_prime;
  c.d_over_lambda_exc = scales.d_over_lambda_exc;
  c.detuning_ratio = scales.detuning_ratio;
  c.sum_ratio = scales.sum_ratio;
  c.gap_ratio = scales.gap_ratio;
  c.n_bose = scales.n_bose;
  c.beta_hbar_omega = scales.beta_hbar_omega;
  c.gamma0_over_nu = scales.gamma0_over_nu;
  c.positions_over_lambda.resize(qubits.n_qubits);
  if (qubits.positions) {
    for (int i = 0; i < qubits.n_qubits; ++i)
      c.positions_over_lambda[i] = (*qubits.positions)[i] / scales.lambda;
  } else {
    for (int i = 0; i < qubits.n_qubits; ++i)
      c.positions_over_lambda[i] = i * c.a_over_lambda;
  }
  return c;
}

double DimensionlessConfig::boltzmann_weight() const {
  if (std::isinf(beta_hbar_omega)) return 0.0;
  return std::exp(-beta_hbar_omega);
}

namespace {

Preset make_yig_nv() {
  Preset p;
  p.name = "yig-nv";
  p.bath.spin_stiffness_D = 4.3e-30;        // erg cm^2
  p.bath.surface_spin_density_s = 8e-12;    // G^2 cm s
  p.bath.gilbert_alpha = 1e-4;
  p.bath.zero_field_gap_K = 3.296e-18;      // erg (~0.497 GHz)
  p.bath.gyromagnetic_gamma = kTwoPi * 2.8e6;  // (rad/s)/G
  p.bath.film_thickness_L = 10e-7;          // 10 nm
  // Diffusive longitudinal-channel placeholders with a ~1 um diffusion
  // length; diagnostic only.
  LongitudinalTransport lt;
  lt.spin_conductivity_sigma = 1.0;
  lt.spin_relaxation_tau_s = 1e-8;
  lt.static_susceptibility_chi0 = 1e0;
  p.bath.longitudinal = lt;

  p.qubits.n_qubits = 9;
  p.qubits.standoff_d = 30e-7;              // 30 nm
  p.qubits.zero_field_splitting_Delta0 = kHbar * kTwoPi * 2.87e9;  // erg
  p.qubits.qubit_gamma_tilde = kTwoPi * 2.8e6;
  // Placeholder lattice constant; scenarios set a via a/lambda.
  p.qubits.lattice_constant_a = 40e-7;

  p.env.applied_field_B0 = 0.0;
  p.env.temperature_T = 0.0;
  p.env.detuning = kTwoPi * 1e7;            // 2*pi*10 MHz
  return p;
}

}  // namespace

const Preset& preset(const std::string& name) {
  static const Preset yig_nv = make_yig_nv();
  if (name == "yig-nv") return yig_nv;
  throw ConfigValidation("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"yig-nv"}; }

}  // namespace coopmag
