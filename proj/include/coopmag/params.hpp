#pragma once

#include <optional>
#include <string>
#include <vector>

namespace coopmag {

// Longitudinal spin transport of the film, needed only for the diffusive
// chi^zz diagnostic. Units are bath-specific CGS.
struct LongitudinalTransport {
  double spin_conductivity_sigma = 0.0;
  double spin_relaxation_tau_s = 0.0;   // s
  double static_susceptibility_chi0 = 0.0;

  double diffusion_length() const;      // l_s = sqrt(sigma*tau_s/chi0)
  void validate() const;
};

// Ferromagnetic film parameters (CGS).
struct BathSpec {
  double spin_stiffness_D = 0.0;        // erg cm^2
  double surface_spin_density_s = 0.0;  // G^2 cm s
  double gilbert_alpha = 0.0;           // dimensionless
  double zero_field_gap_K = 0.0;        // erg
  double gyromagnetic_gamma = 0.0;      // (rad/s)/G
  double film_thickness_L = 0.0;        // cm, informational
  std::optional<LongitudinalTransport> longitudinal;

  void validate() const;
};

// 1d qubit array above the film (CGS lengths in cm).
struct QubitArraySpec {
  int n_qubits = 1;
  double lattice_constant_a = 0.0;          // cm
  double standoff_d = 0.0;                  // cm, film-to-array distance
  double zero_field_splitting_Delta0 = 0.0; // erg
  double qubit_gamma_tilde = 0.0;           // (rad/s)/G
  // Optional explicit 1d coordinates (cm, strictly increasing); overrides the
  // uniform lattice.
  std::optional<std::vector<double>> positions;

  void validate() const;
};

struct Environment {
  double applied_field_B0 = 0.0;  // G
  double temperature_T = 0.0;     // K
  // When set (rad/s), the detuning is the primary knob: omega_qi stays at
  // Delta0/hbar - gamma_tilde*B0 and the gap is placed at omega_qi - detuning.
  // Otherwise the gap follows the applied field, Delta_F = K/hbar + gamma*B0.
  std::optional<double> detuning;

  void validate() const;
};

// Everything derived from the physical inputs. Frequencies are angular
// (rad/s), lengths in cm; the *_over_* fields are dimensionless.
struct DerivedScales {
  double omega_qi = 0.0;
  double gap_DeltaF = 0.0;
  double detuning_ratio = 0.0;  // (omega_qi - Delta_F) / (Delta0/hbar)
  double sum_ratio = 0.0;       // (omega_qi + Delta_F) / (Delta0/hbar)
  double gap_ratio = 0.0;       // Delta_F / (Delta0/hbar)
  double lambda = 0.0;          // cm, sqrt(D / (hbar*(omega_qi - Delta_F)))
  double lambda_prime = 0.0;    // cm, sqrt(D / (hbar*(omega_qi + Delta_F)))
  double lambda_exc = 0.0;      // cm, sqrt(D / (hbar*Delta_F))
  double nu = 0.0;              // 1/s, pi*hbar^2*(gamma*gamma_tilde)^2*s*Delta0/D^2
  double d_over_lambda = 0.0;
  double d_over_lambda_prime = 0.0;
  double d_over_lambda_exc = 0.0;
  double n_bose = 0.0;            // n_B(omega_qi, T)
  double beta_hbar_omega = 0.0;   // +inf at T = 0
  double gamma0_over_nu = 0.0;    // single-qubit emission rate, units of nu
  double gamma0_abs = 0.0;        // 1/s
};

// Dimensionless bundle consumed by the coupling/spectrum/dynamics layers.
struct DimensionlessConfig {
  double a_over_lambda = 0.0;
  double d_over_lambda = 0.0;
  double d_over_lambda_prime = 0.0;
  double d_over_lambda_exc = 0.0;
  double detuning_ratio = 0.0;
  double sum_ratio = 0.0;
  double gap_ratio = 0.0;
  double n_bose = 0.0;
  double beta_hbar_omega = 0.0;
  double gamma0_over_nu = 0.0;
  std::vector<double> positions_over_lambda;

  double lambda_over_lambda_prime() const {
    return d_over_lambda_prime / d_over_lambda;
  }
  double lambda_over_lambda_exc() const {
    return d_over_lambda_exc / d_over_lambda;
  }
  // exp(-beta*hbar*omega_qi); exactly 0 at T = 0.
  double boltzmann_weight() const;
};

// Pure; throws NonPositiveParameter / GapExceedsQubitFrequency.
DerivedScales derive_scales(const BathSpec& bath, const QubitArraySpec& qubits,
                            const Environment& env);

DimensionlessConfig dimensionless_config(const DerivedScales& scales,
                                         const QubitArraySpec& qubits);

// Soft sanity warnings (e.g. Gilbert damping above 0.05) that do not block a
// run; the CLI prints them.
std::vector<std::string> parameter_warnings(const BathSpec& bath);

struct Preset {
  std::string name;
  BathSpec bath;
  QubitArraySpec qubits;
  Environment env;
};

// Named presets addressable from the CLI; throws ConfigValidation for an
// unknown name. "yig-nv" ships the YIG film / NV array defaults.
const Preset& preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace coopmag
