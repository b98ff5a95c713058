#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "oprelay/errors.hpp"
#include "oprelay/ordered_stats.hpp"
#include "support.hpp"

using namespace oprelay;
using oprelay::testing::bessel_k_oracle;
using oprelay::testing::ks_distance;
using oprelay::testing::within_sigma;

namespace {

// I_c evaluated directly in the timer variable y over (c, inf) with Boost's
// adaptive Gauss-Kronrod; shares no code with the library's substitution.
double collision_oracle_quadrature(const CollisionQuery& q) {
  const double c = q.c_over_lambda * q.dist.lambda_us();
  const int m = q.relays;
  auto integrand = [&](double y) {
    if (!(y > c) || std::isinf(y)) return 0.0;
    const double tail = 1.0 - q.dist.cdf(y);
    return m * (m - 1.0) * q.dist.pdf(y) * std::pow(tail, m - 2) * q.dist.cdf(y - c);
  };
  return 1.0 - boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                   integrand, c, std::numeric_limits<double>::infinity(), 20, 1e-13);
}

// int_0^inf g(t) dt over log-spaced panels, t = e^s.
template <class G>
double integrate_positive_axis(G g, double s_lo, double s_hi) {
  using boost::math::quadrature::gauss_kronrod;
  double total = 0.0;
  for (double s = s_lo; s < s_hi; s += 0.5)
    total += gauss_kronrod<double, 31>::integrate(
        [&](double u) { return g(std::exp(u)) * std::exp(u); }, s, std::min(s + 0.5, s_hi), 0);
  return total;
}

const TimerDistribution kMin11(Policy::Min, 1.0, 1.0, 1.0);
const TimerDistribution kHarm11(Policy::Harmonic, 1.0, 1.0, 1.0);

}  // namespace

TEST_SUITE("ordered_stats") {
  TEST_CASE("timer cdf and pdf: closed-form values") {
    CHECK(timer_cdf(kMin11, 2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(timer_cdf(kMin11, 2.0) == doctest::Approx(0.36788).epsilon(1e-5));
    CHECK(timer_pdf(kMin11, 2.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(timer_pdf(kMin11, 2.0) == doctest::Approx(0.18394).epsilon(1e-5));

    // Harmonic: F(1) = e^{-1} K1(1) with K1 from the integral oracle.
    const double expected = std::exp(-1.0) * bessel_k_oracle(1, 1.0);
    CHECK(timer_cdf(kHarm11, 1.0) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(timer_cdf(kHarm11, 1.0) == doctest::Approx(0.221426).epsilon(1e-5));
  }

  TEST_CASE("limits and domain") {
    for (const auto* d : {&kMin11, &kHarm11}) {
      CHECK(d->cdf(1e-3) < 1e-100);
      CHECK(d->cdf(1e12) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(d->cdf(INFINITY) == 1.0);
      CHECK(d->pdf(INFINITY) == 0.0);
      CHECK_THROWS_AS(d->cdf(0.0), DomainError);
      CHECK_THROWS_AS(d->pdf(-1.0), DomainError);
    }
    CHECK_THROWS_AS(TimerDistribution(Policy::Min, 0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(TimerDistribution(Policy::Min, 1.0, 1.0, -2.0), DomainError);
  }

  TEST_CASE("pdf integrates to one") {
    const TimerDistribution dists[] = {
        kMin11, kHarm11, {Policy::Min, 0.3, 2.4, 7.0}, {Policy::Harmonic, 0.2, 5.8, 0.5},
        {Policy::Harmonic, 8.0, 8.0, 100.0}};
    for (const auto& d : dists) {
      const double lam = d.lambda_us();
      const double total =
          integrate_positive_axis([&](double t) { return d.pdf(t); }, std::log(lam) - 12.0,
                                  std::log(lam) + 30.0);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("pdf matches centered finite difference of cdf") {
    const double h = 1e-5;
    auto fd = [&](const TimerDistribution& d, double t) {
      return (d.cdf(t + h) - d.cdf(t - h)) / (2.0 * h);
    };
    CHECK(std::fabs(kHarm11.pdf(1.0) - fd(kHarm11, 1.0)) < 1e-6);
    Rng r(31);
    for (int i = 0; i < 2000; ++i) {
      const TimerDistribution d(i % 2 ? Policy::Min : Policy::Harmonic, 0.1 + 3 * r.uniform(),
                                0.1 + 3 * r.uniform(), 0.5 + r.uniform());
      const double t = 0.05 + 5.0 * r.uniform();
      CHECK(std::fabs(d.pdf(t) - fd(d, t)) < 1e-6);
    }
  }

  TEST_CASE("cdf is monotone within [0, 1]") {
    for (const auto* d : {&kMin11, &kHarm11}) {
      double prev = 0.0;
      for (double t = 1e-3; t < 1e6; t *= 1.05) {
        const double f = d->cdf(t);
        CHECK(f >= prev);
        CHECK(f <= 1.0);
        prev = f;
      }
    }
  }

  TEST_CASE("sampled timers follow the transformed law") {
    struct Case { Policy p; double b1, b2, lam; };
    for (const Case c : {Case{Policy::Min, 1, 1, 1}, Case{Policy::Harmonic, 1, 1, 1},
                         Case{Policy::Harmonic, 0.3, 2.0, 50.0}, Case{Policy::Min, 0.5, 4.0, 3.0}}) {
      const TimerDistribution d(c.p, c.b1, c.b2, c.lam);
      const auto sr = FadingModel::rayleigh(1.0 / c.b1), rd = FadingModel::rayleigh(1.0 / c.b2);
      Rng r(77);
      std::vector<double> ts(1'000'000);
      for (auto& t : ts) {
        const double a = sr.sample(r);
        t = timer_value(c.lam, policy_value(c.p, a, rd.sample(r)));
      }
      CHECK(ks_distance(ts, [&](double t) { return d.cdf(t); }) < 0.002);
    }
  }

  TEST_CASE("gain law behind the timer law") {
    // P(h > z) and its density agree with the timer cdf / pdf through T = lambda / h.
    for (const auto* d : {&kMin11, &kHarm11}) {
      for (double z : {0.01, 0.3, 1.0, 4.0}) {
        CHECK(d->gain_survival(z) == doctest::Approx(d->cdf(1.0 / z)).epsilon(1e-13));
        CHECK(d->gain_pdf(z) == doctest::Approx(d->pdf(1.0 / z) / (z * z)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("joint pdf of the two smallest timers") {
    CHECK(joint_pdf_min_two(6, kMin11, 2.0, 1.0) == 0.0);
    CHECK(joint_pdf_min_two(6, kMin11, 1.0, 1.0) == 0.0);
    CHECK(joint_pdf_min_two(3, kMin11, -1.0, 1.0) == 0.0);
    CHECK(joint_pdf_min_two(2, kHarm11, 0.5, 1.5) ==
          doctest::Approx(2.0 * kHarm11.pdf(0.5) * kHarm11.pdf(1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(joint_pdf_min_two(1, kMin11, 0.5, 1.0), ArgumentError);

    using boost::math::quadrature::gauss_kronrod;
    for (int m : {2, 3, 6}) {
      for (const auto* d : {&kMin11, &kHarm11}) {
        // Outer over s2 = log y2, inner over s1 = log y1 < s2; panels of 0.5.
        auto inner = [&](double s2) {
          const double y2 = std::exp(s2);
          double acc = 0.0;
          for (double s = -12.0; s < s2; s += 0.5) {
            const double hi = std::min(s + 0.5, s2);
            acc += gauss_kronrod<double, 15>::integrate(
                [&](double s1) {
                  const double y1 = std::exp(s1);
                  return joint_pdf_min_two(m, *d, y1, y2) * y1;
                },
                s, hi, 0);
          }
          return acc * y2;
        };
        double total = 0.0;
        for (double s = -12.0; s < 28.0; s += 0.5)
          total += gauss_kronrod<double, 15>::integrate(inner, s, s + 0.5, 0);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
      }
    }
  }

  TEST_CASE("analytic collision probability against an independent quadrature") {
    for (int m : {2, 3, 6}) {
      for (const auto* d : {&kMin11, &kHarm11}) {
        for (double lc : {50.0, 100.0, 200.0, 500.0}) {
          const CollisionQuery q{m, 1.0 / lc, *d};
          const auto r = collision_prob_analytic(q);
          CHECK(r.abs_error <= 1e-6);
          CHECK(std::fabs(r.value - collision_oracle_quadrature(q)) < 1e-8);
        }
      }
    }
    // Asymmetric hops and non-unit lambda.
    const CollisionQuery q{4, 0.01, TimerDistribution(Policy::Harmonic, 0.3, 2.7, 40.0)};
    CHECK(std::fabs(collision_prob_analytic(q).value - collision_oracle_quadrature(q)) < 1e-8);
  }

  TEST_CASE("analytic collision probability: reference values and limits") {
    CHECK(collision_prob_analytic({6, 0.0, kMin11}).value == 0.0);
    CHECK(collision_prob_analytic({2, 0.0, kHarm11}).value == 0.0);
    // M = 6, min policy, lambda / c = 200. Reference from an independent
    // scipy evaluation of the same integral.
    CHECK(collision_prob_analytic({6, 1.0 / 200, kMin11}).value ==
          doctest::Approx(0.0064755805).epsilon(1e-8));
    CHECK(collision_prob_analytic({6, 1e6, kMin11}).value == doctest::Approx(1.0));
    CHECK_THROWS_AS(collision_prob_analytic({1, 0.01, kMin11}), ArgumentError);
    CHECK_THROWS_AS(collision_prob_analytic({3, -0.01, kMin11}), DomainError);
  }

  TEST_CASE("collision probability is nonincreasing in lambda / c") {
    for (const auto* d : {&kMin11, &kHarm11}) {
      double prev = 1.0;
      for (double lc = 1.0; lc < 1e5; lc *= 1.7) {
        const double p = collision_prob_analytic({6, 1.0 / lc, *d}).value;
        CHECK(p <= prev + 1e-9);
        prev = p;
      }
    }
  }

  TEST_CASE("asymmetric clusters collide less than the midway cluster") {
    for (double v : {3.0, 4.0}) {
      for (Policy p : {Policy::Min, Policy::Harmonic}) {
        auto prob = [&](TopologyCase c) {
          const auto t = make_topology(c, v, 6);
          const auto& r = t.profiles.front();
          return collision_prob_analytic(
                     {6, 1.0 / 200, TimerDistribution(p, r.beta1(), r.beta2(), 1.0)})
              .value;
        };
        const double c1 = prob(TopologyCase::Midway), c2 = prob(TopologyCase::Third),
                     c3 = prob(TopologyCase::Tenth);
        CHECK(c2 < c1);
        CHECK(c3 < c2);
      }
    }
  }

  TEST_CASE("Monte Carlo oracle") {
    const McEstimate zero = mc_collision_oracle({6, 0.0, kMin11}, 20000, 1);
    CHECK(zero.events == 0);
    CHECK(zero.probability == 0.0);
    CHECK_THROWS_AS(mc_collision_oracle({6, 0.01, kMin11}, 9999, 1), ArgumentError);
    CHECK_THROWS_AS(mc_collision_oracle({1, 0.01, kMin11}, 20000, 1), ArgumentError);

    const CollisionQuery q{2, 1.0 / 100, kMin11};
    const auto mc = mc_collision_oracle(q, 10'000'000, 2024);
    CHECK(within_sigma(mc.probability, collision_prob_analytic(q).value, mc.std_error));

    for (const auto* d : {&kMin11, &kHarm11}) {
      CollisionSimulation sim;
      sim.policy = d->policy();
      sim.relays.assign(6, RelayProfile(1.0, 1.0));
      const double windows[] = {1.0 / 50, 1.0 / 100, 1.0 / 200, 1.0 / 500};
      const auto est = mc_collision_rates(sim, windows, 1'000'000, 9);
      for (std::size_t k = 0; k < 4; ++k)
        CHECK(within_sigma(est[k].probability, collision_prob_analytic({6, windows[k], *d}).value,
                           est[k].std_error));
    }
  }

  TEST_CASE("Ricean K=1 collides slightly more than Rayleigh") {
    CollisionSimulation sim;
    sim.relays.assign(6, RelayProfile(1.0, 1.0));
    sim.fading = FadingModel::ricean(1.0);
    const double w = 1.0 / 200;
    const auto ricean = mc_collision_rates(sim, std::span<const double>(&w, 1), 1'000'000, 3).front();
    const double rayleigh = collision_prob_analytic({6, w, kMin11}).value;
    CHECK(ricean.probability > rayleigh + 3.0 * ricean.std_error);
    CHECK(ricean.probability < 1.5 * rayleigh);
  }

  TEST_CASE("oracle results do not depend on thread count") {
    const CollisionQuery q{3, 0.01, kHarm11};
    const auto a = mc_collision_oracle(q, 300'000, 5, 1);
    const auto b = mc_collision_oracle(q, 300'000, 5, 4);
    CHECK(a.events == b.events);
    CHECK(a.probability == b.probability);
  }

  TEST_CASE("binomial estimate") {
    const auto e = binomial_estimate(25, 100);
    CHECK(e.probability == 0.25);
    CHECK(e.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
    CHECK(binomial_estimate(0, 100).std_error == 0.0);
  }
}
