#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oprelay/errors.hpp"
#include "oprelay/quadrature.hpp"

using namespace oprelay;

TEST_SUITE("quadrature") {
  TEST_CASE("smooth integrands") {
    auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.abs_error <= 1e-9);

    r = integrate_adaptive([](double x) { return std::exp(-x * x); }, -6.0, 6.0);
    CHECK(r.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
  }

  TEST_CASE("endpoint singularity is handled without evaluating the endpoint") {
    auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                                {1e-9, 0.0, 4000});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
  }

  TEST_CASE("sharp peak") {
    auto r = integrate_adaptive([](double x) { return 1e-4 / (x * x + 1e-8); }, -1.0, 1.0);
    CHECK(r.value == doctest::Approx(2.0 * std::atan(1e4)).epsilon(1e-9));
  }

  TEST_CASE("budget exhaustion is reported, not hidden") {
    auto r = integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0,
                                {1e-14, 0.0, 5});
    CHECK_FALSE(r.converged);
    CHECK(r.evaluations == 15 * (2 * 5 - 1));
  }

  TEST_CASE("reversed and empty intervals") {
    auto f = [](double x) { return x * x; };
    CHECK(integrate_adaptive(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0));
    CHECK(integrate_adaptive(f, 2.0, 2.0).value == 0.0);
    CHECK_THROWS_AS(integrate_adaptive(f, 0.0, INFINITY), DomainError);
  }
}
