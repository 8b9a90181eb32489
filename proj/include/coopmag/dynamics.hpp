#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "coopmag/couplings.hpp"

namespace coopmag {

// One collective decay/pump channel from the eigendecomposition of the rate
// matrix: jump operator sum_alpha coeffs[alpha] * sigma_alpha^-/+ applied at
// `rate` (= twice the eigenvalue of Gamma resp. GammaTilde).
struct JumpChannel {
  double rate = 0.0;
  Eigen::VectorXd coeffs;
};

struct JumpChannels {
  std::vector<JumpChannel> emission;    // sigma^- combinations
  std::vector<JumpChannel> absorption;  // sigma^+ combinations
  int n_qubits = 0;
};

// Diagonalize the (conditioned, PSD) rate matrices into orthonormal channels;
// channels with rate below 1e-14 * Gamma0 are dropped. Absorption channels
// share the emission eigenvectors with detailed-balance-scaled rates.
JumpChannels build_jump_channels(const CouplingMatrices& c);

// Rates/couplings for the many-body generator. `from_couplings` normalizes to
// Gamma0 = 1 so times are in units of 1/Gamma0.
struct LindbladModel {
  int n = 0;
  Eigen::MatrixXd J;           // symmetric, zero diagonal
  Eigen::MatrixXd Gamma;       // PSD
  Eigen::MatrixXd GammaTilde;  // detailed-balance partner
  JumpChannels channels;

  static LindbladModel from_couplings(const CouplingMatrices& c,
                                      bool normalize_to_gamma0 = true);
};

// Convenience states in the 2^N computational basis (bit set = excited).
Eigen::VectorXcd all_excited_state(int n);
Eigen::MatrixXcd all_excited_density(int n);
Eigen::MatrixXcd thermal_product_density(int n, double boltzmann_weight);

// Observables.
Eigen::VectorXd sigma_z_expectations(const Eigen::MatrixXcd& rho);
Eigen::VectorXd sigma_z_expectations(const Eigen::VectorXcd& psi);  // normalized
Eigen::MatrixXd correlation_map(const Eigen::MatrixXcd& rho);
Eigen::MatrixXd correlation_map(const Eigen::VectorXcd& psi);

// Many-body Lindblad generator on 2^N x 2^N density matrices. apply() assumes
// a Hermitian input (the density-matrix invariant) and produces a Hermitian,
// traceless derivative. Not thread-safe: one generator per thread.
class LindbladGenerator {
 public:
  explicit LindbladGenerator(const LindbladModel& model);

  int n() const { return n_; }
  int dim() const { return dim_; }

  void apply(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho) const;
  // Fast path on contiguous column-major dim x dim buffers.
  void apply_raw(const std::complex<double>* rho,
                 std::complex<double>* drho) const;
  // Non-Hermitian drift K = -i H_eff on a pure state, dpsi = K psi.
  void apply_drift(const Eigen::VectorXcd& psi, Eigen::VectorXcd& dpsi) const;

  // Collective relaxation rate R = -(1/2) d/dt sum<sigma_z>, evaluated from
  // the generator (no numerical differentiation).
  double emission_rate(const Eigen::MatrixXcd& rho) const;
  double emission_rate(const Eigen::VectorXcd& psi_normalized) const;

  // rate_m * ||c_m psi||^2 for every emission then absorption channel.
  void channel_intensities(const Eigen::VectorXcd& psi,
                           std::vector<double>& out) const;
  // Apply emission channel m (or absorption with emission_count offset).
  void apply_channel(int channel_index, const Eigen::VectorXcd& psi,
                     Eigen::VectorXcd& out) const;
  int emission_count() const { return static_cast<int>(model_.channels.emission.size()); }
  int total_channels() const {
    return emission_count() + static_cast<int>(model_.channels.absorption.size());
  }

 private:
  void drift_column(const std::complex<double>* x,
                    std::complex<double>* t) const;

  LindbladModel model_;
  int n_ = 0, dim_ = 0;
  Eigen::VectorXd k_diag_;   // diagonal of K (real, <= 0)
  Eigen::MatrixXcd m_coef_;  // -iJ - Gamma (off-diagonal)
  Eigen::MatrixXd two_gamma_, two_gamma_tilde_;
  mutable Eigen::MatrixXcd scratch_;
};

// One-shot generator action (builds a generator; convenient for tests).
Eigen::MatrixXcd liouvillian_apply(const LindbladModel& model,
                                   const Eigen::MatrixXcd& rho);

struct DynamicsResult {
  std::vector<double> t;           // units 1/Gamma0 (per the model normalization)
  Eigen::MatrixXd sigma_z;         // N x T
  std::vector<double> sum_sigma_z;
  std::vector<double> emission_rate;
  std::vector<std::pair<double, Eigen::MatrixXd>> correlations;
  double max_trace_drift = 0.0;    // dense runs
  int trajectory_count = 0;        // 0 for deterministic runs
  Eigen::MatrixXd sigma_z_stderr;  // present iff stochastic
  std::vector<double> sum_sigma_z_stderr;
  std::vector<double> emission_rate_stderr;
  std::vector<Eigen::MatrixXcd> states;  // filled when store_states requested
};

struct EvolveOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int dense_n_max = 10;
  bool with_correlations = false;
  // Snapshot times for correlation maps; empty means every grid point when
  // with_correlations is set.
  std::vector<double> correlation_times;
  bool store_states = false;
  double max_trace_drift = 1e-10;
};

// Exact dense integration of the master equation; reference path, N <= dense_n_max.
DynamicsResult evolve_density_matrix(const Eigen::MatrixXcd& rho0,
                                     const LindbladModel& model,
                                     const std::vector<double>& t_grid,
                                     const EvolveOptions& opts = {});

struct TrajectoryOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  int n_traj = 2000;
  std::uint64_t master_seed = 0x5eed5eedULL;
  int n_threads = 0;  // 0: COOPMAG_THREADS if set, else hardware_concurrency
  double jump_time_tol = 1e-6;
  bool with_correlations = false;
  std::vector<double> correlation_times;
  int n_max = 14;
};

// Monte-Carlo wavefunction unraveling. Deterministic in
// (master_seed, n_traj, grid); thread count does not affect results.
DynamicsResult run_trajectories(const Eigen::VectorXcd& psi0,
                                const LindbladModel& model,
                                const std::vector<double>& t_grid,
                                const TrajectoryOptions& opts = {});

}  // namespace coopmag
