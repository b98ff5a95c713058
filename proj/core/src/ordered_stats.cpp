#include "oprelay/ordered_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oprelay/errors.hpp"
#include "oprelay/parallel.hpp"
#include "oprelay/special_functions.hpp"

namespace oprelay {
namespace {

constexpr std::uint64_t kCollisionStreamTag = 0x636f6c6c6973696fULL;
constexpr double kReportedErrorLimit = 1e-6;
constexpr double kRoundoffFloor = -1e-12;
constexpr double kTailCut = 1e-17;

void require_relays(int relays) {
  if (relays < 2)
    throw ArgumentError("collision analysis requires at least two relays, got " +
                        std::to_string(relays));
}

}  // namespace

TimerDistribution::TimerDistribution(Policy policy, double beta1, double beta2,
                                     double lambda_us)
    : policy_(policy), beta1_(beta1), beta2_(beta2), lambda_(lambda_us) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !std::isfinite(beta1) || !std::isfinite(beta2))
    throw DomainError("timer distribution: beta1, beta2 must be finite and > 0");
  if (!(lambda_us > 0.0) || !std::isfinite(lambda_us))
    throw DomainError("timer distribution: lambda must be finite and > 0");
}

double TimerDistribution::gain_survival(double z) const noexcept {
  if (z <= 0.0) return 1.0;
  if (std::isinf(z)) return 0.0;
  const double b = beta1_ + beta2_;
  if (policy_ == Policy::Min) return std::exp(-b * z);
  const double a = std::sqrt(beta1_ * beta2_);
  const double x = z * a;
  // e^{-z b/2} K1(x) written with the scaled Bessel function.
  return x * bessel_k1_scaled(x) * std::exp(-z * (0.5 * b + a));
}

double TimerDistribution::gain_pdf(double z) const noexcept {
  if (z < 0.0 || std::isinf(z)) return 0.0;
  const double b = beta1_ + beta2_;
  if (policy_ == Policy::Min) return b * std::exp(-b * z);
  if (z == 0.0) return 0.0;
  const double a = std::sqrt(beta1_ * beta2_);
  const double x = z * a;
  return 0.5 * x * (b * bessel_k1_scaled(x) + 2.0 * a * bessel_k0_scaled(x)) *
         std::exp(-z * (0.5 * b + a));
}

double TimerDistribution::cdf(double t) const {
  if (!(t > 0.0)) throw DomainError("timer cdf: t must be > 0");
  if (std::isinf(t)) return 1.0;
  return std::clamp(gain_survival(lambda_ / t), 0.0, 1.0);
}

double TimerDistribution::pdf(double t) const {
  if (!(t > 0.0)) throw DomainError("timer pdf: t must be > 0");
  if (std::isinf(t)) return 0.0;
  const double z = lambda_ / t;
  return (lambda_ / (t * t)) * gain_pdf(z);
}

double timer_cdf(const TimerDistribution& dist, double t) { return dist.cdf(t); }
double timer_pdf(const TimerDistribution& dist, double t) { return dist.pdf(t); }

double joint_pdf_min_two(int relays, const TimerDistribution& dist, double y1,
                         double y2) {
  require_relays(relays);
  if (!(y1 > 0.0) || !(y1 < y2)) return 0.0;
  const double tail = 1.0 - dist.cdf(y2);
  return static_cast<double>(relays) * (relays - 1) * dist.pdf(y1) * dist.pdf(y2) *
         std::pow(tail, relays - 2);
}

QuadratureResult collision_prob_analytic(const CollisionQuery& q) {
  require_relays(q.relays);
  if (!(q.c_over_lambda >= 0.0) || !std::isfinite(q.c_over_lambda))
    throw DomainError("collision_prob_analytic: c/lambda must be finite and >= 0");

  QuadratureResult out;
  if (q.c_over_lambda == 0.0) {
    out.converged = true;
    return out;
  }

  const auto& dist = q.dist;
  const double lambda = dist.lambda_us();
  const double c = q.c_over_lambda * lambda;
  const int tail_power = q.relays - 2;

  // y = lambda / u maps (c, inf) onto (0, lambda / c); dy = lambda / u^2 du.
  auto integrand = [&](double u) {
    const double y = lambda / u;
    const double lag = y - c;
    if (!(lag > 0.0)) return 0.0;
    const double jacobian = lambda / (u * u);
    return dist.pdf(y) * jacobian * std::pow(1.0 - dist.cdf(y), tail_power) *
           dist.cdf(lag);
  };

  // In u the integrand is the gain density times factors in [0, 1], so the
  // part beyond u_cut is at most P(h > u_cut). Cutting there keeps the
  // Kronrod nodes on the mass when lambda / c is large.
  const double u_max = 1.0 / q.c_over_lambda;
  double u_cut = 1.0 / (dist.beta1() + dist.beta2());
  while (u_cut < u_max && dist.gain_survival(u_cut) > kTailCut) u_cut *= 2.0;
  u_cut = std::min(u_cut, u_max);
  const double tail_bound = u_cut < u_max ? dist.gain_survival(u_cut) : 0.0;

  QuadratureOptions opts;
  opts.abs_tol = 1e-9;
  opts.max_intervals = 4000;
  const QuadratureResult ic = integrate_adaptive(integrand, 0.0, u_cut, opts);
  const double scale = static_cast<double>(q.relays) * (q.relays - 1);

  out.evaluations = ic.evaluations;
  out.abs_error = scale * (ic.abs_error + tail_bound);
  double p = 1.0 - scale * ic.value;
  if (p < 0.0 && p > kRoundoffFloor) p = 0.0;
  out.value = std::clamp(p, 0.0, 1.0);
  out.converged = ic.converged && out.abs_error <= kReportedErrorLimit;
  if (!out.converged)
    throw NumericError("collision_prob_analytic: quadrature did not converge", out.value,
                       out.abs_error);
  return out;
}

McEstimate binomial_estimate(std::uint64_t events, std::uint64_t trials) {
  McEstimate e;
  e.trials = trials;
  e.events = events;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  e.probability = static_cast<double>(events) / n;
  e.std_error = std::sqrt(e.probability * (1.0 - e.probability) / n);
  return e;
}

namespace {

struct CountVector {
  std::vector<std::uint64_t> events;
  CountVector& operator+=(const CountVector& other) {
    if (events.size() < other.events.size()) events.resize(other.events.size(), 0);
    for (std::size_t i = 0; i < other.events.size(); ++i) events[i] += other.events[i];
    return *this;
  }
};

}  // namespace

std::vector<McEstimate> mc_collision_rates(const CollisionSimulation& sim,
                                           std::span<const double> c_over_lambda,
                                           std::uint64_t trials, std::uint64_t seed,
                                           unsigned threads) {
  if (sim.relays.empty()) throw ArgumentError("mc_collision_rates: no relays");
  for (double c : c_over_lambda)
    if (!(c >= 0.0) || !std::isfinite(c))
      throw DomainError("mc_collision_rates: c/lambda must be finite and >= 0");

  std::vector<FadingModel> hop_sr, hop_rd;
  for (const auto& r : sim.relays) {
    hop_sr.push_back(sim.fading.with_mean_power(1.0 / r.beta1()));
    hop_rd.push_back(sim.fading.with_mean_power(1.0 / r.beta2()));
  }
  const std::vector<double> windows(c_over_lambda.begin(), c_over_lambda.end());
  const std::size_t relays = sim.relays.size();

  auto body = [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
    Rng rng = Rng::stream(seed, kCollisionStreamTag, chunk);
    CountVector partial{std::vector<std::uint64_t>(windows.size(), 0)};
    for (std::uint64_t t = 0; t < count; ++t) {
      double first = std::numeric_limits<double>::infinity();
      double second = first;
      for (std::size_t i = 0; i < relays; ++i) {
        const double g_sr = hop_sr[i].sample(rng);
        const double g_rd = hop_rd[i].sample(rng);
        const double timer = timer_value(1.0, policy_value(sim.policy, g_sr, g_rd));
        if (timer < first) {
          second = first;
          first = timer;
        } else if (timer < second) {
          second = timer;
        }
      }
      if (relays < 2) continue;
      for (std::size_t k = 0; k < windows.size(); ++k)
        if (second < first + windows[k]) ++partial.events[k];
    }
    return partial;
  };

  const CountVector total = run_chunked<CountVector>(trials, threads, body);
  std::vector<McEstimate> out;
  out.reserve(windows.size());
  for (std::size_t k = 0; k < windows.size(); ++k)
    out.push_back(binomial_estimate(total.events.empty() ? 0 : total.events[k], trials));
  return out;
}

McEstimate mc_collision_oracle(const CollisionQuery& q, std::uint64_t trials,
                               std::uint64_t seed, unsigned threads) {
  require_relays(q.relays);
  if (trials < 10000) throw ArgumentError("mc_collision_oracle: trials must be >= 1e4");
  if (q.dist.policy() != Policy::Min && q.dist.policy() != Policy::Harmonic)
    throw ArgumentError("mc_collision_oracle: unknown policy");

  CollisionSimulation sim;
  sim.policy = q.dist.policy();
  sim.relays.assign(static_cast<std::size_t>(q.relays),
                    RelayProfile(q.dist.beta1(), q.dist.beta2()));
  const double window = q.c_over_lambda;
  return mc_collision_rates(sim, std::span<const double>(&window, 1), trials, seed,
                            threads)
      .front();
}

}  // namespace oprelay
