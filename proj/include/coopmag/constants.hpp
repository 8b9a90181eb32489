#pragma once

#include <numbers>

namespace coopmag {

// CGS-Gaussian values used throughout. All omegas in the library are angular
// frequencies; energies in erg convert via hbar below.
inline constexpr double kHbar = 1.0546e-27;          // erg s
inline constexpr double kBoltzmann = 1.380649e-16;   // erg/K
inline constexpr double kPi = std::numbers::pi_v<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

}  // namespace coopmag
