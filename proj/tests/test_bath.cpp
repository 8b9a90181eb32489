#include <cmath>
#include <complex>

#include <doctest.h>

#include "coopmag/bath.hpp"
#include "coopmag/constants.hpp"
#include "coopmag/errors.hpp"

using namespace coopmag;

namespace {
struct Fixture {
  Preset p = preset("yig-nv");
  DerivedScales s = derive_scales(p.bath, p.qubits, p.env);
};
}  // namespace

TEST_CASE("spin-wave dispersion") {
  Fixture f;
  CHECK(dispersion_omega_f(0.0, f.p.bath, f.s) == f.s.gap_DeltaF);
  // The light line touches the qubit frequency at k = 1/lambda by the very
  // definition of lambda; with a/lambda = pi this is the zone edge k = pi/a.
  const double w = dispersion_omega_f(1.0 / f.s.lambda, f.p.bath, f.s);
  CHECK(std::abs(w - f.s.omega_qi) < 1e-9 * f.s.omega_qi);
  const double a = kPi * f.s.lambda;
  const double w_edge = dispersion_omega_f(kPi / a, f.p.bath, f.s);
  CHECK(std::abs(w_edge - f.s.omega_qi) < 1e-9 * f.s.omega_qi);
}

TEST_CASE("transverse susceptibility chi^{-+}") {
  Fixture f;
  const double w = f.s.omega_qi;
  const double k_res = 1.0 / f.s.lambda;
  const std::complex<double> at_res = chi_minus_plus(w, k_res, f.p.bath, f.s);
  // Purely imaginary i*s/(alpha*omega) at the resonant momentum.
  const double expect = f.p.bath.surface_spin_density_s /
                        (f.p.bath.gilbert_alpha * w);
  CHECK(std::abs(at_res.real()) < 1e-9 * std::abs(expect));
  CHECK(at_res.imag() == doctest::Approx(expect).epsilon(1e-12));

  // alpha -> 0 limit away from resonance approaches the real closed form.
  BathSpec b = f.p.bath;
  b.gilbert_alpha = 1e-12;
  const double k = 2.5 / f.s.lambda;
  const std::complex<double> v = chi_minus_plus(w, k, b, f.s);
  const double real_limit =
      b.surface_spin_density_s /
      (b.spin_stiffness_D / kHbar * k * k - (w - f.s.gap_DeltaF));
  CHECK(std::abs(v.real() - real_limit) < 1e-6 * std::abs(real_limit));
  CHECK(std::abs(v.imag()) < 1e-6 * std::abs(real_limit));

  // |chi| peaks at the resonant momentum on a k grid.
  double best_k = 0.0, best = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double kk = (0.5 + 1.0 * i / 400.0) / f.s.lambda;
    const double mag = std::abs(chi_minus_plus(w, kk, f.p.bath, f.s));
    if (mag > best) {
      best = mag;
      best_k = kk;
    }
  }
  CHECK(std::abs(best_k * f.s.lambda - 1.0) < 5e-3);

  // Damping dissipates: one sign of Im across k for omega > 0.
  for (int i = 0; i <= 50; ++i) {
    const double kk = (0.02 + 3.0 * i / 50.0) / f.s.lambda;
    CHECK(chi_minus_plus(w, kk, f.p.bath, f.s).imag() > 0.0);
  }
}

TEST_CASE("transverse susceptibility chi^{+-}") {
  Fixture f;
  const double w = f.s.omega_qi;
  // Finite everywhere: denominator bounded below by the sum frequency.
  for (double kl : {0.0, 0.5, 1.0, 3.0, 10.0}) {
    const std::complex<double> v =
        chi_plus_minus(w, kl / f.s.lambda, f.p.bath, f.s);
    CHECK(std::isfinite(std::abs(v)));
    CHECK(std::abs(v) <
          f.p.bath.surface_spin_density_s / (w + f.s.gap_DeltaF) * 1.001);
  }
  // k = 0 closed form: s/(D/lambda'^2 - i alpha omega) in angular units.
  const std::complex<double> v0 = chi_plus_minus(w, 0.0, f.p.bath, f.s);
  const std::complex<double> expect =
      f.p.bath.surface_spin_density_s /
      std::complex<double>(w + f.s.gap_DeltaF, -f.p.bath.gilbert_alpha * w);
  CHECK(std::abs(v0 - expect) < 1e-12 * std::abs(expect));
  // Crossing relation chi^{+-}(w,k) = conj(chi^{-+}(-w,k)).
  for (double kl : {0.2, 0.9, 1.7}) {
    const double k = kl / f.s.lambda;
    const std::complex<double> lhs = chi_plus_minus(w, k, f.p.bath, f.s);
    const std::complex<double> rhs =
        std::conj(chi_minus_plus(-w, k, f.p.bath, f.s));
    CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(lhs));
  }
}

TEST_CASE("longitudinal susceptibility diagnostics") {
  Fixture f;
  REQUIRE(f.p.bath.longitudinal.has_value());
  const LongitudinalTransport& lt = *f.p.bath.longitudinal;
  const double chi0 = lt.static_susceptibility_chi0;
  // Static limit equals chi0 for any k.
  for (double k : {0.0, 1e3, 1e6})
    CHECK(std::abs(chi_zz(0.0, k, f.p.bath) - chi0) < 1e-12 * chi0);
  // Short wavelengths: diffusion irrelevant.
  const std::complex<double> hi_k = chi_zz(f.s.omega_qi, 1e9, f.p.bath);
  CHECK(std::abs(hi_k - chi0) < 1e-4 * chi0);
  // Crossover point omega*chi0/sigma = l_s^-2 + k^2 -> chi0 (1+i)/2.
  const double ls = lt.diffusion_length();
  const double k = 1.0 / ls;  // pole term = 2/ls^2
  const double omega =
      (1.0 / (ls * ls) + k * k) * lt.spin_conductivity_sigma / chi0;
  const std::complex<double> v = chi_zz(omega, k, f.p.bath);
  CHECK(std::abs(v - chi0 * std::complex<double>(0.5, 0.5)) < 1e-12 * chi0);

  BathSpec no_lt = f.p.bath;
  no_lt.longitudinal.reset();
  CHECK_THROWS_AS(chi_zz(1.0, 1.0, no_lt), MissingTransportParameters);
}
