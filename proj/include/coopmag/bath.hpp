#pragma once

#include <complex>

#include "coopmag/params.hpp"

namespace coopmag {

struct SusceptibilityPoint {
  double omega = 0.0;  // rad/s
  double k = 0.0;      // 1/cm
  std::complex<double> value;
};

// Spin-wave dispersion omega_F(k) = (D/hbar) k^2 + Delta_F. Diagnostic; the
// gap comes from the resolved scales so both parameterizations agree.
double dispersion_omega_f(double k, const BathSpec& bath,
                          const DerivedScales& scales);

// Transverse susceptibilities of the film in the weak-damping LLG closure.
// chi^{ -+ }(omega,k) = s / [ (D/hbar)k^2 - (omega - Delta_F) - i*alpha*omega ]
std::complex<double> chi_minus_plus(double omega, double k,
                                    const BathSpec& bath,
                                    const DerivedScales& scales);
// chi^{ +- }(omega,k) = s / [ (D/hbar)k^2 + (omega + Delta_F) - i*alpha*omega ]
std::complex<double> chi_plus_minus(double omega, double k,
                                    const BathSpec& bath,
                                    const DerivedScales& scales);

// Diffusive longitudinal susceptibility. Diagnostic only: it never enters the
// master-equation construction (two-magnon channel dropped).
// Throws MissingTransportParameters without a LongitudinalTransport block.
std::complex<double> chi_zz(double omega, double k, const BathSpec& bath);

}  // namespace coopmag
