#include "coopmag/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"

namespace coopmag {

EffectiveHamiltonian effective_hamiltonian(const CouplingMatrices& c,
                                           double omega_offset) {
  const int n = c.n();
  EffectiveHamiltonian h;
  h.omega_offset = omega_offset;
  h.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      h.matrix(i, j) =
          std::complex<double>(c.J(i, j) + (i == j ? omega_offset : 0.0),
                               -c.Gamma(i, j));
  return h;
}

SingleExcitationSpectrum single_excitation_modes(
    const EffectiveHamiltonian& h) {
  const int n = static_cast<int>(h.matrix.rows());
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.matrix);
  if (es.info() != Eigen::Success)
    throw EigensolverFailure("complex eigensolve did not converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXcd& ev = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&ev](int a, int b) {
    const double ga = -ev(a).imag(), gb = -ev(b).imag();
    if (ga != gb) return ga < gb;
    return ev(a).real() < ev(b).real();
  });

  SingleExcitationSpectrum s;
  s.eigenvalues.resize(n);
  s.right_eigenvectors.resize(n, n);
  const double hnorm = h.matrix.norm();
  for (int m = 0; m < n; ++m) {
    s.eigenvalues(m) = ev(order[m]);
    Eigen::VectorXcd v = es.eigenvectors().col(order[m]);
    v /= v.norm();
    s.right_eigenvectors.col(m) = v;
    const double res = (h.matrix * v - s.eigenvalues(m) * v).norm() /
                       std::max(hnorm, 1e-300);
    s.max_residual = std::max(s.max_residual, res);
  }
  return s;
}

BandPoint band_structure_sum(double k_times_a, double a_over_lambda,
                             const DimensionlessConfig& cfg, long n_max) {
  if (n_max < 1) throw DomainError("band sum needs n_max >= 1");
  const double b = a_over_lambda;
  const double gamma0 = coupling_gamma(0.0, cfg);
  // Kahan accumulators for the two cosine series.
  double sj = 0.0, cj = 0.0, sg = 0.0, cg = 0.0;
  const long taper_start = std::max<long>(1, n_max - n_max / 10);
  double last = 0.0;
  for (long nn = 1; nn <= n_max; ++nn) {
    const double rho = nn * b;
    const double ck = std::cos(nn * k_times_a);
    double w = 1.0;
    if (nn > taper_start)
      w = 0.5 * (1.0 + std::cos(kPi * static_cast<double>(nn - taper_start) /
                                static_cast<double>(n_max - taper_start)));
    const double jt = 2.0 * w * coupling_j(rho, cfg, CouplingMode::Asymptotic) * ck;
    const double gt = 2.0 * w * coupling_gamma(rho, cfg) * ck;
    {
      const double y = jt - cj;
      const double t = sj + y;
      cj = (t - sj) - y;
      sj = t;
    }
    {
      const double y = gt - cg;
      const double t = sg + y;
      cg = (t - sg) - y;
      sg = t;
    }
    if (nn == n_max)
      last = std::abs(2.0 * coupling_gamma(rho, cfg) * ck);
  }
  BandPoint p;
  p.J_k = sj;
  p.Gamma_k = gamma0 + sg;
  p.last_term = last;
  return p;
}

double band_structure_poisson(double k_times_a, double a_over_lambda,
                              const DimensionlessConfig& cfg) {
  const double b = a_over_lambda;        // lattice constant over lambda
  const double kl = k_times_a / b;       // k * lambda
  const double g = kTwoPi / b;           // reciprocal spacing * lambda
  const double gamma0 = coupling_gamma(0.0, cfg);
  // Images with |k*lambda + m*g| < 1 contribute.
  const long m_lo = static_cast<long>(std::ceil((-1.0 - kl) / g)) - 1;
  const long m_hi = static_cast<long>(std::floor((1.0 - kl) / g)) + 1;
  double sum = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) {
    const double q = kl + m * g;
    const double under = 1.0 - q * q;
    if (under <= 0.0) continue;
    if (under < 1e-12)
      throw SingularPoint("band-edge singularity in the image sum");
    sum += 1.0 / std::sqrt(under);
  }
  return gamma0 * (2.0 / b) * sum;
}

double band_structure_poisson_zone_average(double a_over_lambda,
                                           const DimensionlessConfig& cfg) {
  // Per image m, integrate (2/b)/sqrt(1-q^2) dk over the zone overlap of its
  // support; with q = k*lambda + m*g the antiderivative is arcsin(q)/b in
  // units of k*a. Zone average divides by 2*pi.
  const double b = a_over_lambda;
  const double g = kTwoPi / b;
  const double gamma0 = coupling_gamma(0.0, cfg);
  const double zone_lo = -kPi / b, zone_hi = kPi / b;  // k*lambda range
  const long m_max = static_cast<long>(std::ceil((1.0 + kPi / b) / g)) + 1;
  double acc = 0.0;
  for (long m = -m_max; m <= m_max; ++m) {
    const double lo = std::max(zone_lo, -1.0 - m * g);
    const double hi = std::min(zone_hi, 1.0 - m * g);
    if (hi <= lo) continue;
    const double qlo = std::clamp(lo + m * g, -1.0, 1.0);
    const double qhi = std::clamp(hi + m * g, -1.0, 1.0);
    acc += std::asin(qhi) - std::asin(qlo);
  }
  // Integral of Gamma_k over k*lambda is gamma0*2*acc/b; zone width 2*pi/b.
  return gamma0 * acc / kPi;
}

BandStructure compute_band_structure(int n_k, double a_over_lambda,
                                     const DimensionlessConfig& cfg,
                                     long n_max, BandMethod method) {
  if (n_k < 1) throw DomainError("need at least one k point");
  BandStructure bs;
  bs.n_max = n_max;
  bs.method = method;
  bs.k_times_a.resize(n_k);
  bs.J_k.resize(n_k);
  bs.Gamma_k.resize(n_k);
  for (int i = 0; i < n_k; ++i) {
    // Half-offset grid: avoids k = 0, the zone edge, and (for the window
    // sizes used here) the light-line singularities of the closed form.
    const double ka = -kPi + kTwoPi * (i + 0.5) / n_k;
    bs.k_times_a[i] = ka;
    const BandPoint p = band_structure_sum(ka, a_over_lambda, cfg, n_max);
    bs.J_k[i] = p.J_k;
    bs.Gamma_k[i] = method == BandMethod::Poisson
                        ? band_structure_poisson(ka, a_over_lambda, cfg)
                        : p.Gamma_k;
  }
  return bs;
}

}  // namespace coopmag
