#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsverify/constants.hpp"

using namespace lsv;

namespace {

LSConstantInput reference_input() {
  LSConstantInput in;
  in.kappa = 1.0;
  in.d = 1;
  in.l = {1.0};
  in.gamma = 1.0;
  in.eta = 1.0;
  in.rho = 1.0;
  in.log_h = 0.0;
  return in;
}

}  // namespace

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(unit_ball_volume(2) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-12));
  CHECK(unit_ball_volume(4) == doctest::Approx(kPi * kPi / 2.0).epsilon(1e-12));
  CHECK(unit_ball_volume(5) == doctest::Approx(8.0 * kPi * kPi / 15.0).epsilon(1e-12));
  for (int d = 3; d <= 100; ++d) {
    CHECK(unit_ball_volume(d) ==
          doctest::Approx(unit_ball_volume(d - 2) * 2.0 * kPi / d).epsilon(1e-12));
  }
  CHECK_THROWS_AS(unit_ball_volume(0), Error);
}

TEST_CASE("reference theorem constant") {
  LSConstantResult r = theorem_constant(reference_input());
  CHECK(r.log_base == doctest::Approx(std::log(48.0)).epsilon(1e-14));
  CHECK(r.exponent == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(r.log_value ==
        doctest::Approx(5.0 * std::log(48.0) - std::log(6.0)).epsilon(1e-14));
  REQUIRE(r.value.has_value());
  CHECK(*r.value == doctest::Approx(std::pow(48.0, 5.0) / 6.0).epsilon(1e-12));
}

TEST_CASE("doubling kappa raises the exponent by exactly two") {
  LSConstantInput in = reference_input();
  LSConstantResult r1 = theorem_constant(in);
  in.kappa = 2.0;
  LSConstantResult r2 = theorem_constant(in);
  CHECK(r2.exponent - r1.exponent == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("monotonicity in every parameter") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    LSConstantInput in;
    in.d = 1 + static_cast<int>(rng.uniform() * 3);
    in.rho = 0.1 + rng.uniform();
    in.l.assign(static_cast<std::size_t>(in.d), 0.0);
    for (double& lj : in.l) lj = in.rho * (1.0 + rng.uniform());
    in.kappa = 1.0 + 4.0 * rng.uniform();
    in.gamma = 0.05 + 0.9 * rng.uniform();
    in.eta = 0.05 + 0.9 * rng.uniform();
    in.log_h = 5.0 * rng.uniform();
    const double base_value = theorem_constant(in).log_value;

    LSConstantInput mod = in;
    mod.kappa *= 1.5;
    CHECK(theorem_constant(mod).log_value >= base_value);
    mod = in;
    mod.log_h += 1.0;
    CHECK(theorem_constant(mod).log_value >= base_value);
    mod = in;
    mod.l[0] *= 2.0;
    CHECK(theorem_constant(mod).log_value >= base_value);
    mod = in;
    mod.gamma *= 0.5;
    CHECK(theorem_constant(mod).log_value > base_value);
    mod = in;
    mod.eta *= 0.5;
    CHECK(theorem_constant(mod).log_value > base_value);
  }
}

TEST_CASE("log value is affine in log h with the predicted slope") {
  LSConstantInput in = reference_input();
  in.kappa = 3.0;
  in.l = {2.0};
  in.gamma = 0.5;
  in.eta = 0.25;
  LSConstantResult r0 = theorem_constant(in);
  const double slope_expect = 4.0 * r0.log_base / std::log(2.0);
  for (double t : {0.5, 1.0, 10.0}) {
    LSConstantInput shifted = in;
    shifted.log_h = in.log_h + t;
    LSConstantResult rt = theorem_constant(shifted);
    CHECK((rt.log_value - r0.log_value) / t ==
          doctest::Approx(slope_expect).epsilon(1e-9));
  }
}

TEST_CASE("huge constants stay in log space") {
  LSConstantInput in = reference_input();
  in.log_h = 100.0;
  LSConstantResult r = theorem_constant(in);
  CHECK(r.log_value > 700.0);
  CHECK_FALSE(r.value.has_value());
  CHECK(std::isfinite(r.log_value));
}

TEST_CASE("input validation") {
  LSConstantInput in = reference_input();
  in.kappa = 0.5;
  CHECK_THROWS_AS(theorem_constant(in), Error);
  in = reference_input();
  in.l = {0.5};  // below rho
  CHECK_THROWS_AS(theorem_constant(in), Error);
  in = reference_input();
  in.gamma = 1.5;
  CHECK_THROWS_AS(theorem_constant(in), Error);
  in = reference_input();
  in.eta = 0.0;
  CHECK_THROWS_AS(theorem_constant(in), Error);
  in = reference_input();
  in.log_h = -0.1;
  CHECK_THROWS_AS(theorem_constant(in), Error);
}

TEST_CASE("corollary exponent templates") {
  CHECK(corollary_exponent(CorollaryFamily::Pure, 1, 1.0, 0.0, std::nullopt, 7.0).exponent ==
        doctest::Approx(8.0).epsilon(1e-14));
  CHECK(corollary_exponent(CorollaryFamily::Harmonic, 1, 1.0, 0.0, std::nullopt, 1.0).exponent ==
        doctest::Approx(13.0).epsilon(1e-14));
  // Divergence with sigma_min = 4 and lambda = 16 matches pure with lambda = 4.
  const double K = 2.5;
  CHECK(corollary_exponent(CorollaryFamily::Divergence, 2, 0.3, 16.0, 4.0, K).exponent ==
        doctest::Approx(
            corollary_exponent(CorollaryFamily::Pure, 2, 0.3, 4.0, std::nullopt, K).exponent)
            .epsilon(1e-14));
  CHECK(corollary_exponent(CorollaryFamily::Pure, 2, 1.0, 1.0, std::nullopt, 3.0, 0.5).log_base ==
        doctest::Approx(2.0 * std::log(3.0) - std::log(0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(corollary_exponent(CorollaryFamily::Divergence, 1, 1.0, 1.0, std::nullopt, 1.0),
                  Error);
  CHECK_THROWS_AS(corollary_exponent(CorollaryFamily::Pure, 1, 1.0, 1.0, std::nullopt, 0.0),
                  Error);
}

TEST_CASE("fractional lift") {
  CHECK(fractional_lift(1.0, 7.3) == doctest::Approx(7.3).epsilon(1e-15));
  CHECK(fractional_lift(0.5, 9.0) == doctest::Approx(81.0).epsilon(1e-13));
  CHECK(fractional_lift(2.0, 16.0) == doctest::Approx(4.0).epsilon(1e-13));
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const double s1 = 0.25 + 2.0 * rng.uniform();
    const double s2 = 0.25 + 2.0 * rng.uniform();
    const double lambda = 10.0 * rng.uniform();
    CHECK(fractional_lift(s1, fractional_lift(s2, lambda)) ==
          doctest::Approx(fractional_lift(s1 * s2, lambda)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fractional_lift(0.0, 1.0), Error);
  CHECK_THROWS_AS(fractional_lift(1.0, -1.0), Error);
}
