#include "coopmag/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <thread>

#include <Eigen/Eigenvalues>

#include "coopmag/errors.hpp"
#include "coopmag/integrator.hpp"
#include "coopmag/rng.hpp"

namespace coopmag {

using cd = std::complex<double>;

namespace {

int popcount(int x) { return __builtin_popcount(static_cast<unsigned>(x)); }

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COOPMAG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

int qubits_of_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

}  // namespace

JumpChannels build_jump_channels(const CouplingMatrices& c) {
  const int n = c.n();
  JumpChannels ch;
  ch.n_qubits = n;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c.Gamma);
  if (es.info() != Eigen::Success)
    throw EigensolverFailure("rate-matrix eigendecomposition failed");
  const double gamma0 = c.Gamma.trace() / n;
  const double rate_floor = 1e-14 * gamma0;
  const double bw =
      c.Gamma(0, 0) > 0.0 ? c.GammaTilde(0, 0) / c.Gamma(0, 0) : 0.0;
  for (int m = n - 1; m >= 0; --m) {  // descending rate
    const double rate = 2.0 * std::max(es.eigenvalues()(m), 0.0);
    if (rate < rate_floor) continue;
    JumpChannel jc;
    jc.rate = rate;
    jc.coeffs = es.eigenvectors().col(m);
    ch.emission.push_back(jc);
    if (bw > 0.0) {
      JumpChannel ac = jc;
      ac.rate = bw * rate;
      ch.absorption.push_back(ac);
    }
  }
  return ch;
}

LindbladModel LindbladModel::from_couplings(const CouplingMatrices& c,
                                            bool normalize_to_gamma0) {
  LindbladModel m;
  m.n = c.n();
  const double g0 = normalize_to_gamma0 ? c.gamma0_over_nu : 1.0;
  if (!(g0 > 0.0)) throw NonPositiveParameter("gamma0 must be positive");
  CouplingMatrices scaled = c;
  scaled.J /= g0;
  scaled.Jz /= g0;
  scaled.Gamma /= g0;
  scaled.GammaTilde /= g0;
  scaled.gamma0_over_nu = c.gamma0_over_nu / g0;
  m.J = scaled.J;
  m.Gamma = scaled.Gamma;
  m.GammaTilde = scaled.GammaTilde;
  m.channels = build_jump_channels(scaled);
  return m;
}

Eigen::VectorXcd all_excited_state(int n) {
  const int dim = 1 << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi(dim - 1) = 1.0;
  return psi;
}

Eigen::MatrixXcd all_excited_density(int n) {
  const Eigen::VectorXcd psi = all_excited_state(n);
  return psi * psi.adjoint();
}

Eigen::MatrixXcd thermal_product_density(int n, double boltzmann_weight) {
  const int dim = 1 << n;
  const double pe = boltzmann_weight / (1.0 + boltzmann_weight);
  const double pg = 1.0 - pe;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const int k = popcount(i);
    rho(i, i) = std::pow(pe, k) * std::pow(pg, n - k);
  }
  return rho;
}

Eigen::VectorXd sigma_z_expectations(const Eigen::MatrixXcd& rho) {
  const int dim = static_cast<int>(rho.rows());
  const int n = qubits_of_dim(dim);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < dim; ++i) {
    const double p = rho(i, i).real();
    for (int a = 0; a < n; ++a) out(a) += (i >> a & 1) ? p : -p;
  }
  return out;
}

Eigen::VectorXd sigma_z_expectations(const Eigen::VectorXcd& psi) {
  const int dim = static_cast<int>(psi.size());
  const int n = qubits_of_dim(dim);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < dim; ++i) {
    const double p = std::norm(psi(i));
    for (int a = 0; a < n; ++a) out(a) += (i >> a & 1) ? p : -p;
  }
  return out;
}

namespace {

Eigen::MatrixXd correlation_from_populations(
    const std::function<double(int)>& pop, int dim) {
  const int n = qubits_of_dim(dim);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < dim; ++i) {
    const double p = pop(i);
    if (p == 0.0) continue;
    for (int a = 0; a < n; ++a) {
      if (!(i >> a & 1)) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!(i >> b & 1)) continue;
        c(a, b) += p;
        c(b, a) += p;
      }
    }
  }
  return c;
}

}  // namespace

Eigen::MatrixXd correlation_map(const Eigen::MatrixXcd& rho) {
  return correlation_from_populations(
      [&rho](int i) { return rho(i, i).real(); },
      static_cast<int>(rho.rows()));
}

Eigen::MatrixXd correlation_map(const Eigen::VectorXcd& psi) {
  return correlation_from_populations(
      [&psi](int i) { return std::norm(psi(i)); },
      static_cast<int>(psi.size()));
}

// ---------------------------------------------------------------------------

LindbladGenerator::LindbladGenerator(const LindbladModel& model)
    : model_(model), n_(model.n), dim_(1 << model.n) {
  if (model_.J.rows() != n_ || model_.Gamma.rows() != n_ ||
      model_.GammaTilde.rows() != n_)
    throw DimensionMismatch("coupling matrices do not match qubit count");
  m_coef_.resize(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      m_coef_(a, b) = cd(-model_.Gamma(a, b), -model_.J(a, b));
  k_diag_.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    double d = 0.0;
    for (int a = 0; a < n_; ++a)
      d -= (i >> a & 1) ? model_.Gamma(a, a) : model_.GammaTilde(a, a);
    k_diag_(i) = d;
  }
  two_gamma_ = 2.0 * model_.Gamma;  // symmetric, so columns double as rows
  two_gamma_tilde_ = 2.0 * model_.GammaTilde;
}

// dpsi = K psi with K = sum_{a!=b} M_ab s_a^+ s_b^- - sum Gt_ab s_a^- s_b^+
//        + diag;  K = -i H_eff.
void LindbladGenerator::apply_drift(const Eigen::VectorXcd& psi,
                                    Eigen::VectorXcd& dpsi) const {
  if (psi.size() != dim_) throw DimensionMismatch("state size != 2^N");
  dpsi.resize(dim_);
  drift_column(psi.data(), dpsi.data());
}

void LindbladGenerator::drift_column(const cd* x, cd* t) const {
  for (int i = 0; i < dim_; ++i) t[i] = k_diag_(i) * x[i];
  const int full = dim_ - 1;
  for (int a = 0; a < n_; ++a) {
    const int ba = 1 << a;
    for (int b = 0; b < n_; ++b) {
      if (a == b) continue;
      const int bb = 1 << b;
      const cd m = m_coef_(a, b);
      const double gt = model_.GammaTilde(a, b);
      const int rest = full ^ ba ^ bb;
      int u = rest;
      if (gt != 0.0) {
        while (true) {
          t[u | ba] += m * x[u | bb];
          t[u | bb] -= gt * x[u | ba];
          if (u == 0) break;
          u = (u - 1) & rest;
        }
      } else {
        while (true) {
          t[u | ba] += m * x[u | bb];
          if (u == 0) break;
          u = (u - 1) & rest;
        }
      }
    }
  }
}

// Contiguous column-major dim x dim buffers. Assumes Hermitian rho.
void LindbladGenerator::apply_raw(const cd* rho, cd* drho) const {
  scratch_.resize(dim_, dim_);
  cd* sc = scratch_.data();
  const bool absorbing = model_.GammaTilde.cwiseAbs().maxCoeff() != 0.0;

  for (int j = 0; j < dim_; ++j) drift_column(rho + j * dim_, sc + j * dim_);

  // drho = K rho + (K rho)^dagger
  for (int j = 0; j < dim_; ++j) {
    cd* o = drho + j * dim_;
    const cd* tc = sc + j * dim_;
    for (int i = 0; i < dim_; ++i) o[i] = tc[i] + std::conj(sc[i * dim_ + j]);
  }

  // recycling: sum_ab 2 Gamma_ab s_b^- rho s_a^+ (+ absorption partner)
  for (int j = 0; j < dim_; ++j) {
    cd* o = drho + j * dim_;
    for (int a = 0; a < n_; ++a) {
      const int ba = 1 << a;
      if (!(j & ba)) {
        const cd* src = rho + (j | ba) * dim_;
        const double* grow = two_gamma_.data() + a * n_;
        for (int i = 0; i < dim_; ++i) {
          cd s(0.0, 0.0);
          for (int b = 0; b < n_; ++b) {
            const int bb = 1 << b;
            if (i & bb) continue;
            s += grow[b] * src[i | bb];
          }
          o[i] += s;
        }
      }
      if (absorbing && (j & ba)) {
        const cd* src = rho + (j ^ ba) * dim_;
        const double* grow = two_gamma_tilde_.data() + a * n_;
        for (int i = 0; i < dim_; ++i) {
          cd s(0.0, 0.0);
          for (int b = 0; b < n_; ++b) {
            const int bb = 1 << b;
            if (!(i & bb)) continue;
            s += grow[b] * src[i ^ bb];
          }
          o[i] += s;
        }
      }
    }
  }
}

void LindbladGenerator::apply(const Eigen::MatrixXcd& rho,
                              Eigen::MatrixXcd& drho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw DimensionMismatch("density matrix size != 2^N x 2^N");
  drho.resize(dim_, dim_);
  apply_raw(rho.data(), drho.data());
}

double LindbladGenerator::emission_rate(const Eigen::MatrixXcd& rho) const {
  if (rho.rows() != dim_) throw DimensionMismatch("density matrix size != 2^N");
  const bool absorbing = model_.GammaTilde.cwiseAbs().maxCoeff() != 0.0;
  cd acc(0.0, 0.0);
  const int full = dim_ - 1;
  for (int a = 0; a < n_; ++a) {
    const int ba = 1 << a;
    for (int b = 0; b < n_; ++b) {
      const int bb = 1 << b;
      const double g = 2.0 * model_.Gamma(a, b);
      const double gt = absorbing ? 2.0 * model_.GammaTilde(a, b) : 0.0;
      if (a == b) {
        for (int i = 0; i < dim_; ++i) {
          if (i & ba)
            acc += g * rho(i, i);
          else
            acc -= gt * rho(i, i);
        }
        continue;
      }
      const int rest = full ^ ba ^ bb;
      int u = rest;
      while (true) {
        // Tr(s_a^+ s_b^- rho) picks rho(i - ba + bb, i) on i = u|ba.
        acc += g * rho(u | bb, u | ba);
        if (gt != 0.0) acc -= gt * rho(u | ba, u | bb);
        if (u == 0) break;
        u = (u - 1) & rest;
      }
    }
  }
  return acc.real();
}

double LindbladGenerator::emission_rate(
    const Eigen::VectorXcd& psi_normalized) const {
  std::vector<double> w;
  channel_intensities(psi_normalized, w);
  double r = 0.0;
  const int ne = emission_count();
  for (int m = 0; m < static_cast<int>(w.size()); ++m)
    r += (m < ne ? w[m] : -w[m]);
  return r;
}

void LindbladGenerator::channel_intensities(const Eigen::VectorXcd& psi,
                                            std::vector<double>& out) const {
  out.assign(total_channels(), 0.0);
  Eigen::VectorXcd tmp(dim_);
  for (int m = 0; m < total_channels(); ++m) {
    apply_channel(m, psi, tmp);
    const int ne = emission_count();
    const double rate = m < ne ? model_.channels.emission[m].rate
                               : model_.channels.absorption[m - ne].rate;
    out[m] = rate * tmp.squaredNorm();
  }
}

void LindbladGenerator::apply_channel(int channel_index,
                                      const Eigen::VectorXcd& psi,
                                      Eigen::VectorXcd& out) const {
  out.setZero(dim_);
  const int ne = emission_count();
  if (channel_index < ne) {
    const Eigen::VectorXd& v = model_.channels.emission[channel_index].coeffs;
    for (int i = 0; i < dim_; ++i) {
      cd s(0.0, 0.0);
      for (int a = 0; a < n_; ++a) {
        const int ba = 1 << a;
        if (!(i & ba)) s += v(a) * psi(i | ba);
      }
      out(i) = s;
    }
  } else {
    const Eigen::VectorXd& v =
        model_.channels.absorption[channel_index - ne].coeffs;
    for (int i = 0; i < dim_; ++i) {
      cd s(0.0, 0.0);
      for (int a = 0; a < n_; ++a) {
        const int ba = 1 << a;
        if (i & ba) s += v(a) * psi(i ^ ba);
      }
      out(i) = s;
    }
  }
}

Eigen::MatrixXcd liouvillian_apply(const LindbladModel& model,
                                   const Eigen::MatrixXcd& rho) {
  LindbladGenerator gen(model);
  Eigen::MatrixXcd drho;
  gen.apply(rho, drho);
  return drho;
}

// ---------------------------------------------------------------------------

namespace {

void hermitize(Eigen::VectorXcd& y, int dim) {
  Eigen::Map<Eigen::MatrixXcd> rho(y.data(), dim, dim);
  for (int j = 0; j < dim; ++j) {
    rho(j, j) = cd(rho(j, j).real(), 0.0);
    for (int i = j + 1; i < dim; ++i) {
      const cd v = 0.5 * (rho(i, j) + std::conj(rho(j, i)));
      rho(i, j) = v;
      rho(j, i) = std::conj(v);
    }
  }
}

double trace_of(const Eigen::VectorXcd& y, int dim) {
  double tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += y(i * dim + i).real();
  return tr;
}

std::vector<int> snapshot_indices(const std::vector<double>& t_grid,
                                  const std::vector<double>& wanted,
                                  bool all_when_empty) {
  std::vector<int> idx;
  if (wanted.empty()) {
    if (all_when_empty)
      for (int i = 0; i < static_cast<int>(t_grid.size()); ++i)
        idx.push_back(i);
    return idx;
  }
  for (double tw : wanted) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(t_grid.size()); ++i)
      if (std::abs(t_grid[i] - tw) < std::abs(t_grid[best] - tw)) best = i;
    idx.push_back(best);
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw DimensionMismatch("empty time grid");
  for (size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw DimensionMismatch("time grid must be strictly increasing");
}

}  // namespace

DynamicsResult evolve_density_matrix(const Eigen::MatrixXcd& rho0,
                                     const LindbladModel& model,
                                     const std::vector<double>& t_grid,
                                     const EvolveOptions& opts) {
  check_grid(t_grid);
  if (model.n > opts.dense_n_max)
    throw DimensionTooLarge("dense evolution limited to dense_n_max qubits");
  const int dim = 1 << model.n;
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw DimensionMismatch("initial density matrix size != 2^N");

  LindbladGenerator gen(model);
  const int nt = static_cast<int>(t_grid.size());
  DynamicsResult res;
  res.t = t_grid;
  res.sigma_z.resize(model.n, nt);
  res.sum_sigma_z.resize(nt);
  res.emission_rate.resize(nt);
  const std::vector<int> snaps =
      opts.with_correlations
          ? snapshot_indices(t_grid, opts.correlation_times, true)
          : std::vector<int>{};

  auto rhs = [&gen](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    dy.resize(y.size());
    gen.apply_raw(y.data(), dy.data());
  };

  IntegratorOptions iopt;
  iopt.rtol = opts.rtol;
  iopt.atol = opts.atol;
  iopt.initial_step = 1e-4;
  Dopri5 integ(rhs, iopt);

  Eigen::VectorXcd y0 =
      Eigen::Map<const Eigen::VectorXcd>(rho0.data(), dim * dim);
  const double trace0 = trace_of(y0, dim);
  integ.init(t_grid.front(), y0);
  integ.set_t_stop(t_grid.back());

  auto sample = [&](int gi, const Eigen::VectorXcd& y) {
    Eigen::VectorXcd yh = y;
    hermitize(yh, dim);
    const Eigen::MatrixXcd rho_mat =
        Eigen::Map<const Eigen::MatrixXcd>(yh.data(), dim, dim);
    const Eigen::VectorXd sz = sigma_z_expectations(rho_mat);
    res.sigma_z.col(gi) = sz;
    res.sum_sigma_z[gi] = sz.sum();
    res.emission_rate[gi] = gen.emission_rate(rho_mat);
    if (std::binary_search(snaps.begin(), snaps.end(), gi))
      res.correlations.emplace_back(t_grid[gi], correlation_map(rho_mat));
    if (opts.store_states) res.states.push_back(rho_mat);
  };

  int gi = 0;
  sample(gi++, y0);
  Eigen::VectorXcd tmp;
  while (gi < nt) {
    integ.step();
    hermitize(integ.mutable_state(), dim);
    const double drift = std::abs(trace_of(integ.state(), dim) - trace0);
    res.max_trace_drift = std::max(res.max_trace_drift, drift);
    if (drift > opts.max_trace_drift)
      throw ConvergenceFailure("density-matrix trace drift exceeded tolerance");
    while (gi < nt && t_grid[gi] <= integ.t() * (1.0 + 1e-15) + 1e-300) {
      integ.interpolate(std::min(t_grid[gi], integ.t()), tmp);
      sample(gi++, tmp);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------

namespace {

struct TrajectoryRecord {
  Eigen::MatrixXd sigma_z;      // N x T
  Eigen::VectorXd sum_sigma_z;  // T
  Eigen::VectorXd rate;         // T
  std::vector<Eigen::MatrixXd> corr;
};

TrajectoryRecord run_one_trajectory(const LindbladGenerator& gen,
                                    const Eigen::VectorXcd& psi0,
                                    const std::vector<double>& t_grid,
                                    const std::vector<int>& snaps,
                                    const TrajectoryOptions& opts,
                                    std::uint64_t seed) {
  const int dim = gen.dim();
  const int n = gen.n();
  const int nt = static_cast<int>(t_grid.size());
  TrajectoryRecord rec;
  rec.sigma_z.resize(n, nt);
  rec.sum_sigma_z.resize(nt);
  rec.rate.resize(nt);

  Rng rng(seed);
  double threshold = rng.next_open();

  auto rhs = [&gen](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    gen.apply_drift(y, dy);
  };
  IntegratorOptions iopt;
  iopt.rtol = opts.rtol;
  iopt.atol = opts.atol;
  iopt.initial_step = 1e-4;
  Dopri5 integ(rhs, iopt);
  integ.init(t_grid.front(), psi0);
  integ.set_t_stop(t_grid.back());

  Eigen::VectorXcd tmp(dim), jumped(dim);
  std::vector<double> weights;
  int snap_cursor = 0;

  auto sample = [&](int gi, const Eigen::VectorXcd& psi) {
    const Eigen::VectorXcd pn = psi / psi.norm();
    const Eigen::VectorXd sz = sigma_z_expectations(pn);
    rec.sigma_z.col(gi) = sz;
    rec.sum_sigma_z(gi) = sz.sum();
    rec.rate(gi) = gen.emission_rate(pn);
    if (snap_cursor < static_cast<int>(snaps.size()) &&
        snaps[snap_cursor] == gi) {
      rec.corr.push_back(correlation_map(pn));
      ++snap_cursor;
    }
  };

  int gi = 0;
  sample(gi++, psi0);
  while (gi < nt) {
    integ.step();
    const double n2_new = integ.state().squaredNorm();
    const bool jump = n2_new < threshold;
    double t_jump = integ.t();
    if (jump) {
      double lo = integ.t_old(), hi = integ.t();
      while (hi - lo > opts.jump_time_tol) {
        const double mid = 0.5 * (lo + hi);
        integ.interpolate(mid, tmp);
        (tmp.squaredNorm() > threshold ? lo : hi) = mid;
      }
      t_jump = hi;
    }
    const double t_limit = jump ? t_jump : integ.t();
    while (gi < nt && t_grid[gi] <= t_limit + 1e-15) {
      integ.interpolate(std::min(t_grid[gi], t_limit), tmp);
      sample(gi++, tmp);
    }
    if (jump && gi < nt) {
      integ.interpolate(t_jump, tmp);
      gen.channel_intensities(tmp, weights);
      double total = 0.0;
      for (double w : weights) total += w;
      if (total > 0.0) {
        double r = rng.next_double() * total;
        int pick = static_cast<int>(weights.size()) - 1;
        for (int m = 0; m < static_cast<int>(weights.size()); ++m) {
          r -= weights[m];
          if (r <= 0.0) {
            pick = m;
            break;
          }
        }
        gen.apply_channel(pick, tmp, jumped);
        jumped /= jumped.norm();
        threshold = rng.next_open();
        integ.init(t_jump, jumped);
        integ.set_t_stop(t_grid.back());
      } else {
        // Numerically dark state: the norm cannot reach the threshold, so
        // lower it and keep drifting.
        threshold = rng.next_open() * tmp.squaredNorm();
        integ.init(t_jump, tmp);
        integ.set_t_stop(t_grid.back());
      }
    }
  }
  return rec;
}

}  // namespace

DynamicsResult run_trajectories(const Eigen::VectorXcd& psi0,
                                const LindbladModel& model,
                                const std::vector<double>& t_grid,
                                const TrajectoryOptions& opts) {
  check_grid(t_grid);
  if (model.n > opts.n_max)
    throw DimensionTooLarge("trajectory evolution limited to n_max qubits");
  const int dim = 1 << model.n;
  if (psi0.size() != dim) throw DimensionMismatch("initial state size != 2^N");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw DimensionMismatch("initial state must be normalized");
  if (opts.n_traj < 1) throw NonPositiveParameter("n_traj must be >= 1");

  const LindbladGenerator gen(model);
  const int nt = static_cast<int>(t_grid.size());
  const std::vector<int> snaps =
      opts.with_correlations
          ? snapshot_indices(t_grid, opts.correlation_times, true)
          : std::vector<int>{};

  std::vector<TrajectoryRecord> recs(opts.n_traj);
  std::atomic<int> cursor{0};
  const int n_workers = std::min(worker_count(opts.n_threads), opts.n_traj);
  auto work = [&]() {
    while (true) {
      const int idx = cursor.fetch_add(1);
      if (idx >= opts.n_traj) break;
      recs[idx] = run_one_trajectory(gen, psi0, t_grid, snaps, opts,
                                     derive_seed(opts.master_seed, idx));
    }
  };
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Reduce in trajectory-index order: scheduling cannot change the result.
  DynamicsResult res;
  res.t = t_grid;
  res.trajectory_count = opts.n_traj;
  const int n = model.n;
  res.sigma_z = Eigen::MatrixXd::Zero(n, nt);
  res.sigma_z_stderr = Eigen::MatrixXd::Zero(n, nt);
  res.sum_sigma_z.assign(nt, 0.0);
  res.sum_sigma_z_stderr.assign(nt, 0.0);
  res.emission_rate.assign(nt, 0.0);
  res.emission_rate_stderr.assign(nt, 0.0);

  Eigen::MatrixXd m2_sz = Eigen::MatrixXd::Zero(n, nt);
  Eigen::VectorXd m2_sum = Eigen::VectorXd::Zero(nt);
  Eigen::VectorXd m2_rate = Eigen::VectorXd::Zero(nt);
  std::vector<Eigen::MatrixXd> corr_mean(snaps.size(),
                                         Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < opts.n_traj; ++k) {
    const double cnt = k + 1.0;
    const TrajectoryRecord& r = recs[k];
    for (int gi = 0; gi < nt; ++gi) {
      for (int a = 0; a < n; ++a) {
        const double d = r.sigma_z(a, gi) - res.sigma_z(a, gi);
        res.sigma_z(a, gi) += d / cnt;
        m2_sz(a, gi) += d * (r.sigma_z(a, gi) - res.sigma_z(a, gi));
      }
      {
        const double d = r.sum_sigma_z(gi) - res.sum_sigma_z[gi];
        res.sum_sigma_z[gi] += d / cnt;
        m2_sum(gi) += d * (r.sum_sigma_z(gi) - res.sum_sigma_z[gi]);
      }
      {
        const double d = r.rate(gi) - res.emission_rate[gi];
        res.emission_rate[gi] += d / cnt;
        m2_rate(gi) += d * (r.rate(gi) - res.emission_rate[gi]);
      }
    }
    for (size_t s = 0; s < snaps.size(); ++s)
      corr_mean[s] += (r.corr[s] - corr_mean[s]) / cnt;
  }
  if (opts.n_traj > 1) {
    const double nt_traj = opts.n_traj;
    const double scale = 1.0 / (nt_traj * (nt_traj - 1.0));
    res.sigma_z_stderr = (m2_sz * scale).cwiseMax(0.0).cwiseSqrt();
    for (int gi = 0; gi < nt; ++gi) {
      res.sum_sigma_z_stderr[gi] = std::sqrt(std::max(0.0, m2_sum(gi) * scale));
      res.emission_rate_stderr[gi] =
          std::sqrt(std::max(0.0, m2_rate(gi) * scale));
    }
  }
  for (size_t s = 0; s < snaps.size(); ++s)
    res.correlations.emplace_back(t_grid[snaps[s]], corr_mean[s]);
  return res;
}

}  // namespace coopmag
