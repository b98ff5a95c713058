#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oprelay/fading.hpp"
#include "oprelay/quadrature.hpp"
#include "oprelay/relay_select.hpp"

namespace oprelay {

/// Law of one relay's timer T = lambda / h under Rayleigh hops with rate
/// parameters (beta1, beta2).
///
///   Min:      F(t) = exp(-(b1 + b2) lambda / t)
///   Harmonic: F(t) = z a exp(-z (b1 + b2) / 2) K1(z a),
///             z = lambda / t, a = sqrt(b1 b2)
class TimerDistribution {
 public:
  TimerDistribution(Policy policy, double beta1, double beta2, double lambda_us);

  Policy policy() const noexcept { return policy_; }
  double beta1() const noexcept { return beta1_; }
  double beta2() const noexcept { return beta2_; }
  double lambda_us() const noexcept { return lambda_; }

  /// P(T <= t). DomainError for t <= 0; +inf maps to 1.
  double cdf(double t) const;
  /// dF/dt. DomainError for t <= 0.
  double pdf(double t) const;

  /// P(h > z) and density of h, the quantities the timer law is built from.
  double gain_survival(double z) const noexcept;
  double gain_pdf(double z) const noexcept;

 private:
  Policy policy_;
  double beta1_;
  double beta2_;
  double lambda_;
};

double timer_cdf(const TimerDistribution& dist, double t);
double timer_pdf(const TimerDistribution& dist, double t);

/// Joint density of the smallest and second-smallest of M i.i.d. timers:
/// M (M-1) f(y1) f(y2) [1 - F(y2)]^(M-2) on 0 < y1 < y2, zero elsewhere.
double joint_pdf_min_two(int relays, const TimerDistribution& dist, double y1,
                         double y2);

struct CollisionQuery {
  int relays = 2;
  double c_over_lambda = 0.0;
  TimerDistribution dist;
};

/// P(Y2 < Y1 + c) = 1 - I_c with
///   I_c = M (M-1) * int_c^inf f(y) [1 - F(y)]^(M-2) F(y - c) dy,
/// integrated in the gain variable u = lambda / y over (0, lambda / c).
/// `value` is clamped to [0, 1]. Throws NumericError (carrying the partial
/// estimate) if the error estimate exceeds 1e-6.
QuadratureResult collision_prob_analytic(const CollisionQuery& query);

struct McEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t events = 0;
};

/// Binomial estimate events / trials with std-error sqrt(p (1 - p) / n).
McEstimate binomial_estimate(std::uint64_t events, std::uint64_t trials);

/// Brute force: per trial draw both hop gains for every relay, form timers
/// and test the runner-up against each window. One set of draws serves all
/// entries of `c_over_lambda` (lambda is fixed to 1).
struct CollisionSimulation {
  std::vector<RelayProfile> relays;
  Policy policy = Policy::Min;
  FadingModel fading = FadingModel::rayleigh();  ///< shape; mean set per hop
};

std::vector<McEstimate> mc_collision_rates(const CollisionSimulation& sim,
                                           std::span<const double> c_over_lambda,
                                           std::uint64_t trials,
                                           std::uint64_t seed,
                                           unsigned threads = 1);

/// Monte Carlo oracle for `query` with Rayleigh hops. Requires trials >= 1e4.
McEstimate mc_collision_oracle(const CollisionQuery& query, std::uint64_t trials,
                               std::uint64_t seed, unsigned threads = 1);

}  // namespace oprelay
