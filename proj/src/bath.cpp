#include "coopmag/bath.hpp"

#include <cmath>

#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"

namespace coopmag {

double dispersion_omega_f(double k, const BathSpec& bath,
                          const DerivedScales& scales) {
  return bath.spin_stiffness_D / kHbar * k * k + scales.gap_DeltaF;
}

std::complex<double> chi_minus_plus(double omega, double k,
                                    const BathSpec& bath,
                                    const DerivedScales& scales) {
  const double stiffness = bath.spin_stiffness_D / kHbar;
  const std::complex<double> denom(stiffness * k * k - (omega - scales.gap_DeltaF),
                                   -bath.gilbert_alpha * omega);
  return bath.surface_spin_density_s / denom;
}

std::complex<double> chi_plus_minus(double omega, double k,
                                    const BathSpec& bath,
                                    const DerivedScales& scales) {
  const double stiffness = bath.spin_stiffness_D / kHbar;
  const std::complex<double> denom(stiffness * k * k + (omega + scales.gap_DeltaF),
                                   -bath.gilbert_alpha * omega);
  return bath.surface_spin_density_s / denom;
}

std::complex<double> chi_zz(double omega, double k, const BathSpec& bath) {
  if (!bath.longitudinal)
    throw MissingTransportParameters(
        "chi_zz needs the longitudinal transport block");
  const LongitudinalTransport& lt = *bath.longitudinal;
  lt.validate();
  const double ls = lt.diffusion_length();
  const double pole = 1.0 / (ls * ls) + k * k;
  const std::complex<double> denom(
      pole, -omega * lt.static_susceptibility_chi0 / lt.spin_conductivity_sigma);
  return lt.static_susceptibility_chi0 * pole / denom;
}

}  // namespace coopmag
