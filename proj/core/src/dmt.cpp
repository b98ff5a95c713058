#include "oprelay/dmt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oprelay/errors.hpp"
#include "oprelay/parallel.hpp"

namespace oprelay {
namespace {

constexpr std::uint64_t kOutageStreamTag = 0x6f75746167650000ULL;
constexpr std::uint64_t kMaxExpStreamTag = 0x6d61786578700000ULL;

// Share of each coordinate's proposal that stays on the nominal Exp(1) law.
// Keeps every per-coordinate likelihood ratio below 1 / kDefensiveShare.
constexpr double kDefensiveShare = 0.5;

struct WeightedCount {
  std::uint64_t events = 0;
  double weight_sum = 0.0;
  double weight_sq_sum = 0.0;

  WeightedCount& operator+=(const WeightedCount& o) {
    events += o.events;
    weight_sum += o.weight_sum;
    weight_sq_sum += o.weight_sq_sum;
    return *this;
  }
};

// Draws Exp(1) gains either directly or from the defensive mixture
// kDefensiveShare * Exp(1) + (1 - kDefensiveShare) * Exp(scale), tracking the
// running likelihood ratio.
class GainSampler {
 public:
  GainSampler(OutageEstimator estimator, double scale)
      : tilted_(estimator == OutageEstimator::Importance && scale < 1.0), scale_(scale) {}

  double draw(Rng& rng, double& weight) const {
    if (!tilted_) return rng.exponential(1.0);
    const bool nominal = rng.uniform() <= kDefensiveShare;
    const double g = rng.exponential(nominal ? 1.0 : scale_);
    const double q = kDefensiveShare * std::exp(-g) +
                     (1.0 - kDefensiveShare) / scale_ * std::exp(-g / scale_);
    weight *= std::exp(-g) / q;
    return g;
  }

 private:
  bool tilted_;
  double scale_;
};

double outage_threshold(Scheme scheme, double rho, double rate) {
  // Gain level at which a single link alone drops into outage.
  const double bits = scheme == Scheme::Direct ? rate : 2.0 * rate;
  return std::expm1(bits * std::log(2.0)) / rho;
}

McEstimate finish(const WeightedCount& c, std::uint64_t trials, bool weighted) {
  if (!weighted) return binomial_estimate(c.events, trials);
  McEstimate e;
  e.trials = trials;
  e.events = c.events;
  const double n = static_cast<double>(trials);
  e.probability = c.weight_sum / n;
  const double second_moment = c.weight_sq_sum / n;
  e.std_error = std::sqrt(std::max(0.0, second_moment - e.probability * e.probability) / n);
  return e;
}

}  // namespace

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::Direct: return "Direct";
    case Scheme::OppDF: return "OppDF";
    case Scheme::OppAF: return "OppAF";
  }
  return "Direct";
}

double RateRule::rate_at(double rho) const {
  if (kind == Kind::Fixed) return value;
  return value * std::log2(rho);
}

void DmtScenario::validate() const {
  if (relays < 1) throw ArgumentError("dmt scenario: at least one relay required");
  if (snr_db.empty()) throw ArgumentError("dmt scenario: empty SNR grid");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw ArgumentError("dmt scenario: SNR values must be finite");
  if (trials_per_point < 10000)
    throw ArgumentError("dmt scenario: trials_per_point must be >= 1e4");
  if (rate.kind == RateRule::Kind::Fixed) {
    if (!(rate.value > 0.0) || !std::isfinite(rate.value))
      throw ArgumentError("dmt scenario: fixed rate must be > 0");
  } else {
    if (!(rate.value > 0.0 && rate.value < 0.5))
      throw ArgumentError("dmt scenario: multiplexing gain must lie in (0, 0.5)");
    for (double s : snr_db)
      if (!(s > 0.0))
        throw ArgumentError("dmt scenario: multiplexing rate needs SNR > 0 dB");
  }
}

LinkGains best_relay_of(std::span<const LinkGains> candidates) {
  if (candidates.empty()) throw ArgumentError("best_relay_of: no candidates");
  std::size_t best = 0;
  double best_min = std::min(candidates[0].source_relay, candidates[0].relay_dest);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double v = std::min(candidates[i].source_relay, candidates[i].relay_dest);
    if (v > best_min) {
      best_min = v;
      best = i;
    }
  }
  return candidates[best];
}

LinkGains select_best_relay_gains(int relays, Rng& rng) {
  if (relays < 1) throw ArgumentError("select_best_relay_gains: at least one relay required");
  LinkGains best{};
  double best_min = -1.0;
  for (int i = 0; i < relays; ++i) {
    const LinkGains g{rng.exponential(1.0), rng.exponential(1.0)};
    const double v = std::min(g.source_relay, g.relay_dest);
    if (v > best_min) {
      best_min = v;
      best = g;
    }
  }
  return best;
}

bool outage_direct(double gain_sd, double rho, double rate) {
  return std::log2(1.0 + rho * gain_sd) <= rate;
}

bool relay_decodes(const OutageSample& s, double rho, double rate) {
  return 0.5 * std::log2(1.0 + rho * s.gain_sr) > rate;
}

bool outage_df(const OutageSample& s, double rho, double rate) {
  const double combined = relay_decodes(s, rho, rate) ? s.gain_sd + s.gain_rd : s.gain_sd;
  return 0.5 * std::log2(1.0 + rho * combined) <= rate;
}

double af_combining_gain(double a, double b) noexcept { return a * b / (a + b + 1.0); }

bool outage_af(const OutageSample& s, double rho, double rate) {
  const double snr = rho * s.gain_sd + af_combining_gain(rho * s.gain_sr, rho * s.gain_rd);
  return 0.5 * std::log2(1.0 + snr) <= rate;
}

double direct_outage_closed_form(double rho, double rate) {
  return -std::expm1(-std::expm1(rate * std::log(2.0)) / rho);
}

std::vector<OutagePoint> outage_curve(const DmtScenario& scn, std::uint64_t seed,
                                      unsigned threads) {
  scn.validate();
  const bool weighted = scn.estimator == OutageEstimator::Importance;
  std::vector<OutagePoint> curve;
  curve.reserve(scn.snr_db.size());

  for (std::size_t point = 0; point < scn.snr_db.size(); ++point) {
    const double rho = std::pow(10.0, scn.snr_db[point] / 10.0);
    const double rate = scn.rate.rate_at(rho);
    const GainSampler sampler(scn.estimator, std::min(1.0, outage_threshold(scn.scheme, rho, rate)));
    const std::uint64_t tag =
        kOutageStreamTag ^ (static_cast<std::uint64_t>(scn.scheme) << 32) ^ point;

    auto body = [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
      Rng rng = Rng::stream(seed, tag, chunk);
      WeightedCount partial;
      for (std::uint64_t t = 0; t < count; ++t) {
        double weight = 1.0;
        OutageSample s;
        s.gain_sd = sampler.draw(rng, weight);
        bool outage = false;
        if (scn.scheme == Scheme::Direct) {
          outage = outage_direct(s.gain_sd, rho, rate);
        } else {
          double best_min = -1.0;
          for (int i = 0; i < scn.relays; ++i) {
            const double g_sr = sampler.draw(rng, weight);
            const double g_rd = sampler.draw(rng, weight);
            const double v = std::min(g_sr, g_rd);
            if (v > best_min) {
              best_min = v;
              s.gain_sr = g_sr;
              s.gain_rd = g_rd;
            }
          }
          outage = scn.scheme == Scheme::OppDF ? outage_df(s, rho, rate)
                                               : outage_af(s, rho, rate);
        }
        if (outage) {
          ++partial.events;
          partial.weight_sum += weight;
          partial.weight_sq_sum += weight * weight;
        }
      }
      return partial;
    };

    const WeightedCount total = run_chunked<WeightedCount>(scn.trials_per_point, threads, body);
    const McEstimate est = finish(total, scn.trials_per_point, weighted);
    curve.push_back({scn.snr_db[point], rate, est.probability, est.std_error, est.trials,
                     est.events});
  }
  return curve;
}

double diversity_slope(std::span<const OutagePoint> curve, double lo_db, double hi_db) {
  std::vector<double> xs, ys;
  for (const auto& p : curve) {
    if (p.snr_db < lo_db || p.snr_db > hi_db) continue;
    if (!(p.probability > 0.0))
      throw InsufficientTrialsError("diversity_slope: zero outage estimate at " +
                                    std::to_string(p.snr_db) +
                                    " dB; increase trials_per_point");
    xs.push_back(p.snr_db / 10.0);
    ys.push_back(-std::log10(p.probability));
  }
  if (xs.size() < 3) throw ArgumentError("diversity_slope: need at least 3 points in window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) throw ArgumentError("diversity_slope: SNR points must differ");
  return sxy / sxx;
}

bool check_lemma4_inequality(double a, double b, double rho, double r) {
  const double level = std::pow(rho, 2.0 * r);
  if (af_combining_gain(rho * a, rho * b) > level) return true;
  const double bound = std::pow(rho, 2.0 * r - 1.0) +
                       std::pow(rho, r - 1.0) * std::sqrt(1.0 + level);
  return std::min(a, b) <= bound;
}

McEstimate max_exponential_below(int m, double threshold, std::uint64_t trials,
                                 std::uint64_t seed, OutageEstimator estimator,
                                 unsigned threads) {
  if (m < 1) throw ArgumentError("max_exponential_below: m must be >= 1");
  if (!(threshold > 0.0)) throw DomainError("max_exponential_below: threshold must be > 0");
  const bool weighted = estimator == OutageEstimator::Importance;
  const double mean = weighted ? threshold : 1.0;
  // Likelihood ratio of Exp(1) against Exp(mean) for the whole draw:
  //   mean^m * exp(sum g * (1/mean - 1)).
  const double log_mean = std::log(mean);
  const std::uint64_t tag = kMaxExpStreamTag ^ static_cast<std::uint64_t>(m);

  auto body = [&](std::uint64_t chunk, std::uint64_t, std::uint64_t count) {
    Rng rng = Rng::stream(seed, tag, chunk);
    WeightedCount partial;
    for (std::uint64_t t = 0; t < count; ++t) {
      double largest = 0.0;
      double total = 0.0;
      for (int i = 0; i < m; ++i) {
        const double g = rng.exponential(mean);
        largest = std::max(largest, g);
        total += g;
      }
      if (largest <= threshold) {
        const double w = weighted ? std::exp(m * log_mean + total * (1.0 / mean - 1.0)) : 1.0;
        ++partial.events;
        partial.weight_sum += w;
        partial.weight_sq_sum += w * w;
      }
    }
    return partial;
  };
  return finish(run_chunked<WeightedCount>(trials, threads, body), trials, weighted);
}

}  // namespace oprelay
