#include "coopmag/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"

namespace coopmag {

namespace {

constexpr double kSeriesAsymptoticCrossover = 16.0;
constexpr long double kEulerGamma = 0.5772156649015328606065120900824024L;

// Ascending series, long-double accumulation. Cancellation at the crossover
// costs ~3 digits; the extended mantissa keeps the result at double accuracy.
long double j0_series(long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 256; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (fabsl(term) < 1e-24L * (fabsl(sum) + 1.0L)) break;
  }
  return sum;
}

long double y0_series(long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L, harmonic = 0.0L, sum = 0.0L;
  for (int k = 1; k < 256; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    harmonic += 1.0L / k;
    const long double contrib = (k % 2 ? term : -term) * harmonic;
    sum += contrib;
    if (fabsl(contrib) < 1e-24L * (fabsl(sum) + 1.0L)) break;
  }
  const long double log_part = (logl(x / 2.0L) + kEulerGamma) * j0_series(x);
  return (2.0L / std::numbers::pi_v<long double>) * (log_part + sum);
}

// Hankel expansion coefficients c_k = ((2k-1)!!)^2/(k! 8^k);
// P = 1 - c2/x^2 + c4/x^4 - ..., Q = -c1/x + c3/x^3 - ...
// Truncated at the minimal term (the series is asymptotic).
void hankel_pq(long double x, long double& p, long double& q) {
  p = 1.0L;
  q = 0.0L;
  long double c = 1.0L, xpow = 1.0L, last = 1e30L;
  for (int k = 1; k < 64; ++k) {
    c *= static_cast<long double>(2 * k - 1) * (2 * k - 1) /
         (8.0L * static_cast<long double>(k));
    xpow /= x;
    const long double term = c * xpow;
    if (term >= last) break;  // divergence onset
    last = term;
    if (k % 2 == 1) {
      q += (((k + 1) / 2) % 2 ? -term : term);
    } else {
      p += ((k / 2) % 2 ? -term : term);
    }
    if (term < 1e-22L) break;
  }
}

long double j0_asymptotic(long double x) {
  long double p, q;
  hankel_pq(x, p, q);
  const long double chi = x - std::numbers::pi_v<long double> / 4.0L;
  return sqrtl(2.0L / (std::numbers::pi_v<long double> * x)) *
         (p * cosl(chi) - q * sinl(chi));
}

long double y0_asymptotic(long double x) {
  long double p, q;
  hankel_pq(x, p, q);
  const long double chi = x - std::numbers::pi_v<long double> / 4.0L;
  return sqrtl(2.0L / (std::numbers::pi_v<long double> * x)) *
         (p * sinl(chi) + q * cosl(chi));
}

// McMahon expansion for the n-th positive zero of J0 (n >= 1). Used only to
// align quadrature panels with sign changes; a few ppm is plenty.
double j0_zero(int n) {
  const double beta = (n - 0.25) * kPi;
  const double b2 = 1.0 / (8.0 * beta);
  return beta + b2 * (1.0 - b2 * b2 * (124.0 / 3.0 - b2 * b2 * 120928.0 / 15.0));
}

// --- Gauss-Kronrod 7-15 panel rule ---------------------------------------

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double fc = f(c);
  double kron = kWgk[7] * fc;
  double gauss = kWg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double f1 = f(c - hw * kXgk[i]);
    const double f2 = f(c + hw * kXgk[i]);
    kron += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) gauss += kWg[i / 2] * (f1 + f2);
  }
  PanelResult r;
  r.value = kron * hw;
  r.error = std::abs((kron - gauss) * hw);
  return r;
}

struct Panel {
  double a, b, value, error;
};

// Global adaptive refinement over an initial segmentation. The final value is
// Kahan-summed in position order so the result does not depend on the split
// sequence.
double integrate_adaptive(const std::function<double(double)>& f,
                          std::vector<std::pair<double, double>> segments,
                          double abs_tol, double rel_tol, int max_panels) {
  std::vector<Panel> panels;
  panels.reserve(segments.size() + 64);
  for (const auto& [a, b] : segments) {
    if (!(b > a)) continue;
    const PanelResult r = gk15(f, a, b);
    panels.push_back({a, b, r.value, r.error});
  }
  auto totals = [&panels]() {
    double v = 0.0, e = 0.0;
    for (const Panel& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair<double, double>(v, e);
  };
  while (true) {
    auto [value, error] = totals();
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) break;
    if (static_cast<int>(panels.size()) >= max_panels)
      throw ConvergenceFailure("adaptive quadrature exceeded panel budget");
    auto worst = std::max_element(
        panels.begin(), panels.end(),
        [](const Panel& x, const Panel& y) { return x.error < y.error; });
    const double a = worst->a, b = worst->b, mid = 0.5 * (a + b);
    if (mid <= a || mid >= b)
      throw ConvergenceFailure("panel width underflow in adaptive quadrature");
    const PanelResult left = gk15(f, a, mid);
    const PanelResult right = gk15(f, mid, b);
    *worst = {a, mid, left.value, left.error};
    panels.push_back({mid, b, right.value, right.error});
  }
  std::sort(panels.begin(), panels.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double sum = 0.0, comp = 0.0;
  for (const Panel& p : panels) {  // Kahan
    const double y = p.value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Segment [lo, hi], cut at the sign changes of J0(x*xi) when the window spans
// many oscillations. Panel sums then alternate and converge stably.
std::vector<std::pair<double, double>> oscillation_segments(double x, double lo,
                                                            double hi) {
  std::vector<std::pair<double, double>> segs;
  if (x * hi <= 20.0 || x <= 0.0) {
    segs.emplace_back(lo, hi);
    return segs;
  }
  double prev = lo;
  const int max_cuts = 20000;
  int n = std::max(1, static_cast<int>(x * lo / kPi) - 2);
  for (int cuts = 0; cuts < max_cuts; ++n) {
    const double z = j0_zero(n) / x;
    if (z <= prev) continue;
    if (z >= hi) break;
    segs.emplace_back(prev, z);
    prev = z;
    ++cuts;
  }
  segs.emplace_back(prev, hi);
  return segs;
}

constexpr int kMaxPanels = 30000;

}  // namespace

void QuadratureSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || !(pole_excision_halfwidth > 0.0) ||
      !(tail_cutoff_multiplier > 0.0))
    throw NonPositiveParameter("quadrature settings must be strictly positive");
  if (!(pole_excision_halfwidth < 0.5))
    throw NonPositiveParameter("pole excision halfwidth must be < 0.5");
}

double bessel_j0(double x) {
  const double xa = std::abs(x);
  if (xa <= kSeriesAsymptoticCrossover)
    return static_cast<double>(j0_series(xa));
  return static_cast<double>(j0_asymptotic(xa));
}

double bessel_y0(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_y0 requires x > 0");
  if (x <= kSeriesAsymptoticCrossover) return static_cast<double>(y0_series(x));
  return static_cast<double>(y0_asymptotic(x));
}

double pv_kernel(double x, double delta, const QuadratureSettings& settings) {
  settings.validate();
  if (!(delta > 0.0)) throw DomainError("pv_kernel requires delta > 0");
  x = std::abs(x);

  const double h = settings.pole_excision_halfwidth;
  const double cutoff =
      std::max(settings.tail_cutoff_multiplier / delta, 2.0 + 2.0 * h);

  auto numerator = [x, delta](double xi) {
    return xi * xi * xi * bessel_j0(xi * x) * std::exp(-delta * xi);
  };
  auto f = [&numerator](double xi) {
    return numerator(xi) / (xi * xi - 1.0);
  };
  // g is the residual factor once the simple pole is peeled off:
  // f(xi) = g(xi)/(xi - 1), g(xi) = xi^3 J0 e^{-delta xi}/(xi + 1).
  auto g = [&numerator](double xi) { return numerator(xi) / (xi + 1.0); };
  const double g1 = g(1.0);
  auto window = [&g, g1](double xi) { return (g(xi) - g1) / (xi - 1.0); };

  const double abs_each = settings.abs_tol / 4.0;
  const double rel_each = settings.rel_tol / 4.0;

  // Below the pole. The PV contribution of the symmetric pole part over
  // [1-h, 1+h] vanishes; what remains there is the smooth window integrand.
  double below = integrate_adaptive(f, oscillation_segments(x, 0.0, 1.0 - h),
                                    abs_each, rel_each, kMaxPanels);
  double win = integrate_adaptive(
      window, {{1.0 - h, 1.0}, {1.0, 1.0 + h}}, abs_each, rel_each, kMaxPanels);
  double above = integrate_adaptive(f, oscillation_segments(x, 1.0 + h, cutoff),
                                    abs_each, rel_each, kMaxPanels);
  return below + win + above;
}

double regular_kernel(double x, double delta,
                      const QuadratureSettings& settings) {
  settings.validate();
  if (!(delta > 0.0)) throw DomainError("regular_kernel requires delta > 0");
  x = std::abs(x);
  const double cutoff = std::max(settings.tail_cutoff_multiplier / delta, 2.0);
  auto f = [x, delta](double xi) {
    return xi * xi * xi * bessel_j0(xi * x) * std::exp(-delta * xi) /
           (xi * xi + 1.0);
  };
  return integrate_adaptive(f, oscillation_segments(x, 0.0, cutoff),
                            settings.abs_tol, settings.rel_tol, kMaxPanels);
}

}  // namespace coopmag
