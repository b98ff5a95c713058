#include "oprelay/relay_select.hpp"

#include <cmath>
#include <limits>

#include "oprelay/errors.hpp"

namespace oprelay {

std::string_view to_string(Policy p) noexcept {
  return p == Policy::Min ? "Min" : "Harmonic";
}

double policy_value(Policy policy, double gain_sr, double gain_rd) {
  if (!(gain_sr >= 0.0) || !(gain_rd >= 0.0) || !std::isfinite(gain_sr) ||
      !std::isfinite(gain_rd))
    throw DomainError("policy_value: gains must be finite and >= 0");
  if (policy == Policy::Min) return std::min(gain_sr, gain_rd);
  if (gain_sr == 0.0 || gain_rd == 0.0) return 0.0;
  // 2ab / (a + b) arranged so large gains do not overflow.
  return gain_sr * (gain_rd / (0.5 * gain_sr + 0.5 * gain_rd));
}

double timer_value(double lambda_us, double h) {
  if (!(lambda_us > 0.0)) throw DomainError("timer_value: lambda must be > 0");
  if (!(h >= 0.0)) throw DomainError("timer_value: h must be >= 0");
  if (h == 0.0) return std::numeric_limits<double>::infinity();
  return lambda_us / h;
}

void TimingParams::validate() const {
  for (double v : {r_max_us, n_max_us, cts_skew_max_us, switch_us, flag_duration_us})
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("timing: all delays must be finite and >= 0");
}

double collision_window(const TimingParams& t) {
  t.validate();
  if (!t.hidden) return t.r_max_us + t.cts_skew_max_us + t.switch_us;
  return t.r_max_us + t.cts_skew_max_us + 2.0 * t.switch_us +
         t.flag_duration_us + 2.0 * t.n_max_us;
}

SelectionOutcome run_selection_round(Policy policy, double lambda_us,
                                     double window_us,
                                     std::span<const LinkGains> gains) {
  if (gains.empty()) throw ArgumentError("run_selection_round: no relays");
  if (!(window_us >= 0.0)) throw DomainError("run_selection_round: window must be >= 0");

  SelectionOutcome out;
  out.window_us = window_us;
  out.h_values.reserve(gains.size());
  out.timers.reserve(gains.size());
  for (const auto& g : gains) {
    const double h = policy_value(policy, g.source_relay, g.relay_dest);
    out.h_values.push_back(h);
    out.timers.push_back(timer_value(lambda_us, h));
  }

  double best = std::numeric_limits<double>::infinity();
  double runner_up = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.timers.size(); ++i) {
    const double t = out.timers[i];
    if (t < best || (i == 0)) {
      if (i != 0) runner_up = best;
      best = t;
      out.winner = i;
    } else if (t < runner_up) {
      runner_up = t;
    }
  }
  out.collided = gains.size() > 1 && runner_up < best + window_us;
  return out;
}

}  // namespace oprelay
