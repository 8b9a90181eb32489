#pragma once

#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace coopmag {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

// Dormand-Prince 5(4) with the standard quartic continuous extension.
// Caller drives the step loop and may read back dense output over the last
// accepted step; the state can be modified between steps (jumps,
// re-symmetrization) via mutable_state().
class Dopri5 {
 public:
  using Rhs =
      std::function<void(double, const Eigen::VectorXcd&, Eigen::VectorXcd&)>;

  Dopri5(Rhs rhs, IntegratorOptions opt);

  void init(double t0, const Eigen::VectorXcd& y0);
  // Advance one accepted step (several attempts if rejected). Throws
  // StepSizeUnderflow / ConvergenceFailure.
  void step();
  // Do not step past t_stop (clamps the step size).
  void set_t_stop(double t_stop) { t_stop_ = t_stop; }

  double t_old() const { return t_old_; }
  double t() const { return t_; }
  const Eigen::VectorXcd& state() const { return y_; }
  // After external modification the cached derivative is refreshed lazily.
  Eigen::VectorXcd& mutable_state() { return y_; }

  // Dense output at t in [t_old, t] of the last accepted step.
  void interpolate(double t_eval, Eigen::VectorXcd& out) const;

 private:
  double error_norm(const Eigen::VectorXcd& y_new) const;
  void build_dense();

  Rhs rhs_;
  IntegratorOptions opt_;
  double t_ = 0.0, t_old_ = 0.0, h_ = 0.0;
  double t_stop_ = std::numeric_limits<double>::infinity();
  long n_steps_ = 0;
  Eigen::VectorXcd y_, y_old_, err_;
  Eigen::VectorXcd k_[7];
  Eigen::VectorXcd cont_[5];
};

}  // namespace coopmag
