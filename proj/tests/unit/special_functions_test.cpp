#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oprelay/errors.hpp"
#include "oprelay/special_functions.hpp"
#include "support.hpp"

using namespace oprelay;
using oprelay::testing::bessel_k_oracle;
using oprelay::testing::bessel_k_scaled_oracle;

namespace {

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_SUITE("special_functions") {
  TEST_CASE("oracle sanity: known values at x = 1") {
    CHECK(bessel_k_oracle(1, 1.0) == doctest::Approx(0.601907230).epsilon(1e-9));
    CHECK(bessel_k_oracle(0, 1.0) == doctest::Approx(0.421024438).epsilon(1e-9));
  }

  TEST_CASE("K0 and K1 at x = 1") {
    CHECK(bessel_k1(1.0) == doctest::Approx(0.601907230).epsilon(1e-9));
    CHECK(bessel_k0(1.0) == doctest::Approx(0.421024438).epsilon(1e-9));
    CHECK(bessel_k(0, 1.0) == bessel_k0(1.0));
    CHECK(bessel_k(1, 1.0) == bessel_k1(1.0));
  }

  TEST_CASE("relative error below 1e-10 on [1e-3, 50]") {
    double worst = 0.0;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
      // Log-spaced grid plus points straddling the series / fraction switch.
      const double x = std::pow(10.0, -3.0 + (std::log10(50.0) + 3.0) * i / n);
      for (int nu : {0, 1}) {
        worst = std::max(worst, rel_err(bessel_k(nu, x), bessel_k_oracle(nu, x)));
        worst = std::max(worst, rel_err(nu ? bessel_k1_scaled(x) : bessel_k0_scaled(x),
                                        bessel_k_scaled_oracle(nu, x)));
      }
    }
    for (double x : {1.999999, 2.0, 2.000001}) {
      worst = std::max(worst, rel_err(bessel_k0(x), bessel_k_oracle(0, x)));
      worst = std::max(worst, rel_err(bessel_k1(x), bessel_k_oracle(1, x)));
    }
    CHECK(worst < 1e-10);
  }

  TEST_CASE("large-x asymptote") {
    for (int nu : {0, 1}) {
      const double x = 50.0;
      CHECK(bessel_k(nu, x) * std::exp(x) * std::sqrt(2.0 * x / std::numbers::pi) ==
            doctest::Approx(1.0).epsilon(1e-2));
      // Leading correction (4 nu^2 - 1) / (8x) brings it within 1e-3.
      const double corrected = 1.0 + (4.0 * nu * nu - 1.0) / (8.0 * x);
      CHECK(std::fabs(bessel_k(nu, x) * std::exp(x) * std::sqrt(2.0 * x / std::numbers::pi) /
                          corrected - 1.0) < 1e-3);
    }
    CHECK(std::isfinite(bessel_k1_scaled(1e5)));
    CHECK(bessel_k0(800.0) == 0.0);
  }

  TEST_CASE("small-x behaviour and Wronskian-style identity") {
    // K1(x) ~ 1/x as x -> 0.
    CHECK(bessel_k1(1e-8) * 1e-8 == doctest::Approx(1.0).epsilon(1e-12));
    // K0 decreasing, K1 > K0 for all x > 0.
    double prev = bessel_k0(1e-3);
    for (double x = 2e-3; x < 40.0; x *= 1.3) {
      CHECK(bessel_k0(x) < prev);
      CHECK(bessel_k1(x) > bessel_k0(x));
      prev = bessel_k0(x);
    }
  }

  TEST_CASE("domain errors") {
    CHECK_THROWS_AS(bessel_k0(0.0), DomainError);
    CHECK_THROWS_AS(bessel_k1(-1.0), DomainError);
    CHECK_THROWS_AS(bessel_k0_scaled(NAN), DomainError);
    CHECK_THROWS_AS(bessel_k(2, 1.0), DomainError);
  }
}
