#include <cmath>
#include <cstring>

#include <doctest.h>

#include "coopmag/constants.hpp"
#include "coopmag/couplings.hpp"
#include "coopmag/errors.hpp"
#include "coopmag/params.hpp"

using namespace coopmag;

namespace {
const Preset& yig() { return preset("yig-nv"); }
}

TEST_CASE("yig-nv preset characteristic lengths") {
  const DerivedScales s = derive_scales(yig().bath, yig().qubits, yig().env);
  const double lambda_nm = s.lambda * 1e7;
  const double lp_nm = s.lambda_prime * 1e7;
  const double lexc_nm = s.lambda_exc * 1e7;
  CHECK(std::abs(lambda_nm - 80.0) / 80.0 < 0.05);  // ~81 nm
  CHECK(lp_nm > 3.0);
  CHECK(lp_nm < 6.0);
  CHECK(lexc_nm > 3.0);
  CHECK(lexc_nm < 6.0);
  // sqrt(D/x) is monotone decreasing in x and here detuning < gap < sum.
  CHECK(s.lambda_prime < s.lambda_exc);
  CHECK(s.lambda_exc < s.lambda);
  CHECK(std::abs(s.detuning_ratio - 1e7 / 2.87e9) < 1e-9);
}

TEST_CASE("emission channel closes at zero detuning") {
  Environment env = yig().env;
  env.detuning = 0.0;
  CHECK_THROWS_AS(derive_scales(yig().bath, yig().qubits, env),
                  GapExceedsQubitFrequency);
  env.detuning = -kTwoPi * 1e6;
  CHECK_THROWS_AS(derive_scales(yig().bath, yig().qubits, env),
                  GapExceedsQubitFrequency);
  // lambda grows without bound as the detuning shrinks.
  env.detuning = kTwoPi * 1e6;
  const DerivedScales s1 = derive_scales(yig().bath, yig().qubits, env);
  env.detuning = kTwoPi * 1e7;
  const DerivedScales s10 = derive_scales(yig().bath, yig().qubits, env);
  CHECK(s1.lambda > 3.0 * s10.lambda);
  CHECK(std::abs(s1.lambda / s10.lambda - std::sqrt(10.0)) < 1e-6);
}

TEST_CASE("field-driven gap path") {
  Environment env;
  env.applied_field_B0 = 100.0;  // G
  env.temperature_T = 0.0;
  const DerivedScales s = derive_scales(yig().bath, yig().qubits, env);
  const double omega_expected = yig().qubits.zero_field_splitting_Delta0 / kHbar -
                                yig().qubits.qubit_gamma_tilde * 100.0;
  const double gap_expected =
      yig().bath.zero_field_gap_K / kHbar + yig().bath.gyromagnetic_gamma * 100.0;
  CHECK(s.omega_qi == omega_expected);
  CHECK(s.gap_DeltaF == gap_expected);
}

TEST_CASE("Bose occupation") {
  // omega_qi/2pi = 2 GHz; hbar*omega/k_B ~ 0.0959-0.0960 K.
  QubitArraySpec q = yig().qubits;
  q.zero_field_splitting_Delta0 = kHbar * kTwoPi * 2e9;
  const double t_unit = kHbar * kTwoPi * 2e9 / kBoltzmann;
  CHECK(std::abs(t_unit - 0.0959) < 2e-4);
  Environment env = yig().env;
  env.temperature_T = t_unit;  // beta*hbar*omega = 1 exactly
  const DerivedScales s = derive_scales(yig().bath, q, env);
  CHECK(std::abs(s.beta_hbar_omega - 1.0) < 1e-12);
  CHECK(std::abs(s.n_bose - 0.5820) < 1e-4);
  CHECK(std::abs(s.n_bose - 1.0 / std::expm1(1.0)) < 1e-14);

  env.temperature_T = 0.0;
  const DerivedScales s0 = derive_scales(yig().bath, q, env);
  CHECK(s0.n_bose == 0.0);
  CHECK(std::isinf(s0.beta_hbar_omega));
  // strictly increasing in temperature
  double prev = 0.0;
  for (double t : {0.01, 0.05, 0.1, 0.3, 1.0}) {
    env.temperature_T = t;
    const double nb = derive_scales(yig().bath, q, env).n_bose;
    CHECK(nb > prev);
    prev = nb;
  }
}

TEST_CASE("derive_scales is deterministic") {
  const DerivedScales a = derive_scales(yig().bath, yig().qubits, yig().env);
  const DerivedScales b = derive_scales(yig().bath, yig().qubits, yig().env);
  CHECK(std::memcmp(&a, &b, sizeof(DerivedScales)) == 0);
}

TEST_CASE("gamma0 consistent with the pair coupling at zero separation") {
  const DerivedScales s = derive_scales(yig().bath, yig().qubits, yig().env);
  const DimensionlessConfig c = dimensionless_config(s, yig().qubits);
  CHECK(std::abs(coupling_gamma(0.0, c) - s.gamma0_over_nu) <=
        1e-12 * s.gamma0_over_nu);
}

TEST_CASE("dimensionless bundle") {
  const DerivedScales s = derive_scales(yig().bath, yig().qubits, yig().env);
  QubitArraySpec q = yig().qubits;
  q.n_qubits = 3;
  q.lattice_constant_a = 0.5 * s.lambda;
  const DimensionlessConfig c = dimensionless_config(s, q);
  CHECK(c.a_over_lambda == doctest::Approx(0.5).epsilon(1e-14));
  REQUIRE(c.positions_over_lambda.size() == 3);
  CHECK(c.positions_over_lambda[0] == 0.0);
  CHECK(c.positions_over_lambda[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(c.positions_over_lambda[2] == doctest::Approx(1.0).epsilon(1e-14));
  // d/lambda near the quoted 0.375 for d = 30 nm, lambda ~ 80 nm.
  CHECK(std::abs(c.d_over_lambda - 0.375) < 0.01);

  QubitArraySpec q1 = yig().qubits;
  q1.lattice_constant_a = s.lambda;
  CHECK(dimensionless_config(s, q1).a_over_lambda == 1.0);
}

TEST_CASE("input validation") {
  BathSpec b = yig().bath;
  b.spin_stiffness_D = -1.0;
  CHECK_THROWS_AS(derive_scales(b, yig().qubits, yig().env),
                  NonPositiveParameter);
  QubitArraySpec q = yig().qubits;
  q.n_qubits = 0;
  CHECK_THROWS_AS(derive_scales(yig().bath, q, yig().env),
                  NonPositiveParameter);
  q = yig().qubits;
  q.n_qubits = 3;
  q.positions = std::vector<double>{0.0, 2e-6, 1e-6};
  CHECK_THROWS_AS(q.validate(), NonPositiveParameter);
  q.positions = std::vector<double>{0.0, 1e-6};
  CHECK_THROWS_AS(q.validate(), DimensionMismatch);
  Environment e = yig().env;
  e.applied_field_B0 = -5.0;
  CHECK_THROWS_AS(e.validate(), NonPositiveParameter);

  BathSpec warny = yig().bath;
  warny.gilbert_alpha = 0.2;
  CHECK(parameter_warnings(warny).size() == 1);
  CHECK(parameter_warnings(yig().bath).empty());
}

TEST_CASE("preset registry") {
  CHECK(preset("yig-nv").name == "yig-nv");
  CHECK_THROWS_AS(preset("nope"), ConfigValidation);
  CHECK(preset_names() == std::vector<std::string>{"yig-nv"});
}
