#include "coopmag/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "coopmag/errors.hpp"

namespace coopmag {

namespace {

constexpr double kC[7] = {0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
constexpr double kD1 = -12715105075.0 / 11282082432.0,
                 kD3 = 87487479700.0 / 32700410799.0,
                 kD4 = -10690763975.0 / 1880347072.0,
                 kD5 = 701980252875.0 / 199316789632.0,
                 kD6 = -1453857185.0 / 822651844.0,
                 kD7 = 69997945.0 / 29380423.0;

}  // namespace

Dopri5::Dopri5(Rhs rhs, IntegratorOptions opt)
    : rhs_(std::move(rhs)), opt_(opt) {}

void Dopri5::init(double t0, const Eigen::VectorXcd& y0) {
  t_ = t_old_ = t0;
  y_ = y0;
  y_old_ = y0;
  h_ = opt_.initial_step;
  n_steps_ = 0;
  for (auto& k : k_) k.resize(y0.size());
  for (auto& c : cont_) c.resize(y0.size());
}

double Dopri5::error_norm(const Eigen::VectorXcd& y_new) const {
  const Eigen::Index n = y_.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc =
        opt_.atol + opt_.rtol * std::max(std::abs(y_old_(i)), std::abs(y_new(i)));
    const double e = std::abs(err_(i)) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

void Dopri5::step() {
  const double t_scale = std::abs(t_) + 1.0;
  Eigen::VectorXcd ytmp(y_.size()), ynew(y_.size());
  y_old_ = y_;
  t_old_ = t_;

  while (true) {
    if (++n_steps_ > opt_.max_steps)
      throw ConvergenceFailure("integrator exceeded max step count");
    double h = std::min(h_, opt_.max_step);
    if (t_ + h > t_stop_) h = t_stop_ - t_;
    if (!(h > t_scale * 1e-14))
      throw StepSizeUnderflow("time step underflow in Dormand-Prince driver");

    rhs_(t_, y_old_, k_[0]);
    ytmp = y_old_ + h * kA21 * k_[0];
    rhs_(t_ + kC[1] * h, ytmp, k_[1]);
    ytmp = y_old_ + h * (kA31 * k_[0] + kA32 * k_[1]);
    rhs_(t_ + kC[2] * h, ytmp, k_[2]);
    ytmp = y_old_ + h * (kA41 * k_[0] + kA42 * k_[1] + kA43 * k_[2]);
    rhs_(t_ + kC[3] * h, ytmp, k_[3]);
    ytmp = y_old_ + h * (kA51 * k_[0] + kA52 * k_[1] + kA53 * k_[2] + kA54 * k_[3]);
    rhs_(t_ + kC[4] * h, ytmp, k_[4]);
    ytmp = y_old_ + h * (kA61 * k_[0] + kA62 * k_[1] + kA63 * k_[2] +
                         kA64 * k_[3] + kA65 * k_[4]);
    rhs_(t_ + kC[5] * h, ytmp, k_[5]);
    ynew = y_old_ + h * (kB1 * k_[0] + kB3 * k_[2] + kB4 * k_[3] +
                         kB5 * k_[4] + kB6 * k_[5]);
    rhs_(t_ + h, ynew, k_[6]);

    err_ = h * (kE1 * k_[0] + kE3 * k_[2] + kE4 * k_[3] + kE5 * k_[4] +
                kE6 * k_[5] + kE7 * k_[6]);
    const double err = error_norm(ynew);

    if (err <= 1.0) {
      t_ = t_old_ + h;
      y_ = ynew;
      const double grow = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h_ = h * std::clamp(grow, 0.2, 5.0);
      // dense-output coefficients for this accepted step
      cont_[0] = y_old_;
      cont_[1] = y_ - y_old_;
      cont_[2] = h * k_[0] - cont_[1];
      cont_[3] = cont_[1] - h * k_[6] - cont_[2];
      cont_[4] = h * (kD1 * k_[0] + kD3 * k_[2] + kD4 * k_[3] + kD5 * k_[4] +
                      kD6 * k_[5] + kD7 * k_[6]);
      return;
    }
    h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
  }
}

void Dopri5::interpolate(double t_eval, Eigen::VectorXcd& out) const {
  const double span = t_ - t_old_;
  const double theta = span != 0.0 ? (t_eval - t_old_) / span : 0.0;
  const double th1 = 1.0 - theta;
  out = cont_[0] +
        theta * (cont_[1] + th1 * (cont_[2] + theta * (cont_[3] + th1 * cont_[4])));
}

}  // namespace coopmag
