#pragma once

namespace coopmag {

struct QuadratureSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double pole_excision_halfwidth = 1e-3;
  double tail_cutoff_multiplier = 50.0;

  void validate() const;  // all positive, halfwidth < 0.5
};

// Bessel functions of the first and second kind, order zero. Ascending series
// with long-double accumulation up to x = 16, Hankel asymptotic expansion with
// minimal-term truncation beyond.
double bessel_j0(double x);
// Requires x > 0 (logarithmic singularity at the origin); throws DomainError.
double bessel_y0(double x);

// Cauchy principal value of
//   int_0^inf dxi xi^3 J0(xi*x) e^{-delta*xi} / (xi^2 - 1)
// across the simple pole at xi = 1. x is normalized to |x|; requires
// delta > 0. Throws ConvergenceFailure if the adaptive scheme cannot meet the
// tolerances within its subdivision budget.
double pv_kernel(double x, double delta,
                 const QuadratureSettings& settings = QuadratureSettings{});

// Pole-free companion integral with denominator (xi^2 + 1), same conventions.
double regular_kernel(double x, double delta,
                      const QuadratureSettings& settings = QuadratureSettings{});

}  // namespace coopmag
