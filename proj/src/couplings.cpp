#include "coopmag/couplings.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"

namespace coopmag {

double coupling_j(double rho_over_lambda, const DimensionlessConfig& cfg,
                  CouplingMode mode, const QuadratureSettings& settings) {
  const double rho = std::abs(rho_over_lambda);
  if (mode == CouplingMode::Asymptotic) {
    if (!(rho > 0.0))
      throw DomainError("asymptotic coupling_j is singular at rho = 0");
    return (kPi / 4.0) * cfg.detuning_ratio * bessel_y0(rho);
  }
  const double pv = pv_kernel(rho, 2.0 * cfg.d_over_lambda, settings);
  const double reg = regular_kernel(rho * cfg.lambda_over_lambda_prime(),
                                    2.0 * cfg.d_over_lambda_prime, settings);
  return -0.5 * (cfg.detuning_ratio * pv + cfg.sum_ratio * reg);
}

double coupling_jz(double rho_over_lambda, const DimensionlessConfig& cfg,
                   const QuadratureSettings& settings) {
  const double rho = std::abs(rho_over_lambda);
  return -cfg.gap_ratio * regular_kernel(rho * cfg.lambda_over_lambda_exc(),
                                         2.0 * cfg.d_over_lambda_exc, settings);
}

double coupling_gamma(double rho_over_lambda, const DimensionlessConfig& cfg) {
  return (kPi / 4.0) * (cfg.n_bose + 1.0) * cfg.detuning_ratio *
         bessel_j0(std::abs(rho_over_lambda)) *
         std::exp(-2.0 * cfg.d_over_lambda);
}

double coupling_gamma_tilde(double rho_over_lambda,
                            const DimensionlessConfig& cfg) {
  return cfg.boltzmann_weight() * coupling_gamma(rho_over_lambda, cfg);
}

CouplingMatrices build_coupling_matrices(
    const std::vector<double>& positions_over_lambda,
    const DimensionlessConfig& cfg, CouplingMode j_mode,
    const QuadratureSettings& settings) {
  const int n = static_cast<int>(positions_over_lambda.size());
  if (n < 1) throw DimensionMismatch("need at least one qubit position");

  CouplingMatrices m;
  m.J = Eigen::MatrixXd::Zero(n, n);
  m.Jz = Eigen::MatrixXd::Zero(n, n);
  m.Gamma = Eigen::MatrixXd::Zero(n, n);
  m.GammaTilde = Eigen::MatrixXd::Zero(n, n);
  m.gamma0_over_nu = coupling_gamma(0.0, cfg);

  // Each unordered pair evaluated once; symmetry is exact by construction.
  for (int i = 0; i < n; ++i) {
    m.Gamma(i, i) = m.gamma0_over_nu;
    for (int j = i + 1; j < n; ++j) {
      const double rho =
          std::abs(positions_over_lambda[i] - positions_over_lambda[j]);
      if (rho < kMinSeparationOverLambda)
        throw CoincidentQubits(
            "qubit separation below the point-dipole validity floor");
      const double jv = coupling_j(rho, cfg, j_mode, settings);
      const double jz = coupling_jz(rho, cfg, settings);
      const double g = coupling_gamma(rho, cfg);
      m.J(i, j) = m.J(j, i) = jv;
      m.Jz(i, j) = m.Jz(j, i) = jz;
      m.Gamma(i, j) = m.Gamma(j, i) = g;
    }
  }

  // The sampled J0 kernel is PSD in exact arithmetic; clip the numerical
  // negatives so the dissipator stays completely positive.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.Gamma);
  if (es.info() != Eigen::Success)
    throw EigensolverFailure("Gamma eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  double worst = 0.0;
  bool clipped = false;
  for (int i = 0; i < n; ++i) {
    if (ev(i) < 0.0) {
      worst = std::max(worst, -ev(i));
      ev(i) = 0.0;
      clipped = true;
    }
  }
  if (clipped) {
    m.Gamma = es.eigenvectors() * ev.asDiagonal() *
              es.eigenvectors().transpose();
    m.Gamma = ((m.Gamma + m.Gamma.transpose()) / 2.0).eval();
  }
  m.psd_clip_applied = worst;
  m.GammaTilde = cfg.boltzmann_weight() * m.Gamma;
  return m;
}

}  // namespace coopmag
