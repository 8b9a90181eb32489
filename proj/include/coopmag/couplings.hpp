#pragma once

#include <vector>

#include <Eigen/Dense>

#include "coopmag/params.hpp"
#include "coopmag/specfun.hpp"

namespace coopmag {

enum class CouplingMode { Full, Asymptotic };

// Pairs closer than this (in units of lambda) are rejected: the Y0 kernel
// diverges logarithmically and the point-dipole model has broken down anyway.
inline constexpr double kMinSeparationOverLambda = 1e-3;

struct CouplingMatrices {
  Eigen::MatrixXd J;           // coherent flip-flop couplings, units nu, zero diagonal
  Eigen::MatrixXd Jz;          // Ising couplings, units nu, zero diagonal (diagnostic)
  Eigen::MatrixXd Gamma;       // correlated emission rates, units nu, PSD
  Eigen::MatrixXd GammaTilde;  // correlated absorption, exp(-beta hbar omega)*Gamma
  double psd_clip_applied = 0.0;  // |most negative eigenvalue clipped to zero|
  double gamma0_over_nu = 0.0;

  int n() const { return static_cast<int>(Gamma.rows()); }
};

// Coherent coupling at separation rho (units of lambda, units of nu out).
// Full: -1/2 [ detuning_ratio * pv_kernel(rho/lambda, 2d/lambda)
//              + sum_ratio * regular_kernel(rho/lambda', 2d/lambda') ]
// Asymptotic: (pi/4) * detuning_ratio * Y0(rho/lambda); requires rho > 0.
double coupling_j(double rho_over_lambda, const DimensionlessConfig& cfg,
                  CouplingMode mode,
                  const QuadratureSettings& settings = QuadratureSettings{});

// Ising channel; computed for reports, never installed in the dynamics.
double coupling_jz(double rho_over_lambda, const DimensionlessConfig& cfg,
                   const QuadratureSettings& settings = QuadratureSettings{});

// Correlated emission, closed form:
// (pi/4) (n_B+1) detuning_ratio J0(rho/lambda) e^{-2d/lambda}.
double coupling_gamma(double rho_over_lambda, const DimensionlessConfig& cfg);

// Detailed balance: exp(-beta hbar omega) * coupling_gamma.
double coupling_gamma_tilde(double rho_over_lambda,
                            const DimensionlessConfig& cfg);

// Assemble the N x N matrices from pairwise distances. Gamma is conditioned
// to be positive semidefinite by clipping negative eigenvalues (magnitude of
// the worst clip reported); GammaTilde is the detailed-balance scaling of the
// conditioned Gamma. Throws CoincidentQubits below kMinSeparationOverLambda.
CouplingMatrices build_coupling_matrices(
    const std::vector<double>& positions_over_lambda,
    const DimensionlessConfig& cfg,
    CouplingMode j_mode = CouplingMode::Asymptotic,
    const QuadratureSettings& settings = QuadratureSettings{});

}  // namespace coopmag
