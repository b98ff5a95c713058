#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "oprelay/ordered_stats.hpp"
#include "oprelay/relay_select.hpp"
#include "oprelay/rng.hpp"

namespace oprelay {

enum class Scheme { Direct, OppDF, OppAF };

std::string_view to_string(Scheme s) noexcept;

/// Target rate: fixed R bits per channel use, or R = r log2(rho).
struct RateRule {
  enum class Kind { Fixed, Multiplex };
  Kind kind = Kind::Fixed;
  double value = 1.0;  ///< R for Fixed, r in (0, 0.5) for Multiplex

  static RateRule fixed(double bits) { return {Kind::Fixed, bits}; }
  static RateRule multiplex(double r) { return {Kind::Multiplex, r}; }

  double rate_at(double rho) const;
};

/// How channel draws are turned into an outage estimate.
enum class OutageEstimator {
  Plain,       ///< event count over nominal i.i.d. Exp(1) draws
  Importance,  ///< defensive-mixture importance sampling toward small gains
};

struct DmtScenario {
  int relays = 1;
  std::vector<double> snr_db;
  RateRule rate;
  Scheme scheme = Scheme::Direct;
  std::uint64_t trials_per_point = 10'000'000;
  OutageEstimator estimator = OutageEstimator::Plain;

  void validate() const;
};

/// |a|^2 of the three links used in one transmission.
struct OutageSample {
  double gain_sd = 0.0;
  double gain_sr = 0.0;
  double gain_rd = 0.0;
};

/// Rule 1 over explicit candidate pairs: the pair with the largest
/// min(gain_sr, gain_rd), first index on ties.
LinkGains best_relay_of(std::span<const LinkGains> candidates);

/// Draws `relays` pairs of i.i.d. Exp(1) gains and returns the Rule 1 winner.
LinkGains select_best_relay_gains(int relays, Rng& rng);

/// Relayed mutual information per channel use is 1/2 log2(...) because source
/// and relay each get half the slot. Direct transmission uses the whole slot.
bool outage_direct(double gain_sd, double rho, double rate);

/// True when the selected relay can decode: 1/2 log2(1 + rho g_sr) > R.
bool relay_decodes(const OutageSample& s, double rho, double rate);

/// Decode-and-forward: if the relay decodes, the destination combines both
/// copies (1/2 log2(1 + rho (g_sd + g_rd))), otherwise it has only the
/// direct copy (1/2 log2(1 + rho g_sd)). Outage iff that is <= R.
bool outage_df(const OutageSample& s, double rho, double rate);

/// Amplify-and-forward combining gain f(a, b) = a b / (a + b + 1).
double af_combining_gain(double a, double b) noexcept;

/// Outage iff 1/2 log2(1 + rho g_sd + f(rho g_sr, rho g_rd)) <= R.
bool outage_af(const OutageSample& s, double rho, double rate);

struct OutagePoint {
  double snr_db = 0.0;
  double rate = 0.0;
  double probability = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t events = 0;  ///< raw count of outage draws
};

/// Pe(rho) over the SNR grid; outage is a deterministic function of the
/// channel draw, so there is no symbol-level simulation. Trials at each SNR
/// point use their own sub-streams (tag = point index).
std::vector<OutagePoint> outage_curve(const DmtScenario& scenario, std::uint64_t seed,
                                      unsigned threads = 1);

/// Closed form for the direct link: 1 - exp(-(2^R - 1) / rho).
double direct_outage_closed_form(double rho, double rate);

/// Least-squares slope of -log10 Pe against log10 rho over points with
/// snr_db in [lo_db, hi_db]. Needs >= 3 points; throws
/// InsufficientTrialsError if any Pe in the window is 0.
double diversity_slope(std::span<const OutagePoint> curve, double lo_db, double hi_db);

/// Event inclusion used for the amplify-and-forward bound:
///   f(rho a, rho b) <= rho^{2r}  implies  min(a, b) <= rho^{2r-1} + rho^{r-1} sqrt(1 + rho^{2r}).
/// Returns whether the implication holds for this sample.
bool check_lemma4_inequality(double a, double b, double rho, double r);

/// P(max of m i.i.d. Exp(1) <= threshold), estimated by sampling.
/// Importance mode draws from Exp(mean = threshold) and reweights.
McEstimate max_exponential_below(int m, double threshold, std::uint64_t trials,
                                 std::uint64_t seed, OutageEstimator estimator,
                                 unsigned threads = 1);

}  // namespace oprelay
