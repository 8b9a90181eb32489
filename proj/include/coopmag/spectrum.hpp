#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "coopmag/couplings.hpp"

namespace coopmag {

// Single-excitation effective non-Hermitian Hamiltonian, H = J - i*Gamma with
// diagonal omega_offset - i*Gamma0. Rotating frame (offset 0) by default.
struct EffectiveHamiltonian {
  Eigen::MatrixXcd matrix;
  double omega_offset = 0.0;
};

struct SingleExcitationSpectrum {
  Eigen::VectorXcd eigenvalues;        // ascending decay rate -Im(E)
  Eigen::MatrixXcd right_eigenvectors; // unit-norm columns, matching order
  double max_residual = 0.0;           // max ||H v - E v|| / ||H||_F
};

EffectiveHamiltonian effective_hamiltonian(const CouplingMatrices& c,
                                           double omega_offset = 0.0);

// Dense complex eigensolve with post-hoc residual check; modes sorted by
// ascending decay rate Gamma_m = -Im(E_m), ties broken by ascending Re(E_m).
SingleExcitationSpectrum single_excitation_modes(const EffectiveHamiltonian& h);

enum class BandMethod { TruncatedSum, Poisson };

struct BandPoint {
  double J_k = 0.0;      // units nu
  double Gamma_k = 0.0;  // units nu
  double last_term = 0.0;  // magnitude of the final (untapered) sum term
};

// Infinite-chain couplings by direct lattice sum, J_k = 2 sum_n J(n a)cos(nka)
// and Gamma_k = Gamma(0) + 2 sum_n Gamma(n a)cos(nka). Kahan-compensated in
// fixed n order; the conditionally convergent tail is closed with a cosine
// taper over the last 10% of terms. k_times_a in (-pi, pi].
BandPoint band_structure_sum(double k_times_a, double a_over_lambda,
                             const DimensionlessConfig& cfg, long n_max);

// Closed form for Gamma_k from the reciprocal-lattice images of the 1d
// transform of the J0 kernel: Gamma_k = Gamma0 (2/(a/lambda)) sum_m
// 1/sqrt(1 - q_m^2) over images q_m = (k + 2 pi m/a) lambda with |q_m| < 1.
// Throws SingularPoint at a band-edge singularity.
double band_structure_poisson(double k_times_a, double a_over_lambda,
                              const DimensionlessConfig& cfg);

// Exact zone average of the Poisson closed form (per-image arcsin integrals);
// equals Gamma0 analytically, returned in units of nu.
double band_structure_poisson_zone_average(double a_over_lambda,
                                           const DimensionlessConfig& cfg);

struct BandStructure {
  std::vector<double> k_times_a;  // grid over (-pi, pi]
  std::vector<double> J_k;        // units nu (truncated sum)
  std::vector<double> Gamma_k;    // units nu
  long n_max = 0;
  BandMethod method = BandMethod::TruncatedSum;
};

BandStructure compute_band_structure(int n_k, double a_over_lambda,
                                     const DimensionlessConfig& cfg,
                                     long n_max, BandMethod method);

}  // namespace coopmag
