#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace oprelay {

/// End-to-end quality metric a relay derives from its two hop gains.
enum class Policy {
  Min,       ///< bottleneck hop: min(g_sr, g_rd)
  Harmonic,  ///< harmonic mean: 2 g_sr g_rd / (g_sr + g_rd)
};

std::string_view to_string(Policy p) noexcept;

/// Power gains |a|^2 seen by one relay.
struct LinkGains {
  double source_relay = 0.0;
  double relay_dest = 0.0;
};

/// Throws DomainError on negative or non-finite gains.
double policy_value(Policy policy, double gain_sr, double gain_rd);

/// lambda / h in microseconds. h = 0 yields +infinity: the relay abstains.
double timer_value(double lambda_us, double h);

/// Physical-layer delay budget of one selection round, in microseconds.
struct TimingParams {
  double r_max_us = 0.0;          ///< max relay-to-relay propagation
  double n_max_us = 0.0;          ///< max relay-to-destination propagation
  double cts_skew_max_us = 0.0;   ///< max |n_b - n_j| between CTS arrivals
  double switch_us = 0.0;         ///< receive-to-transmit turnaround d_s
  double flag_duration_us = 1.0;  ///< flag packet length
  bool hidden = false;            ///< relays cannot hear each other

  void validate() const;
};

/// Worst-case window c within which a second timer can still expire unaware
/// of the winner.
///   visible relays: c = r_max + skew + d_s
///   hidden relays:  c = r_max + skew + 2 d_s + dur + 2 n_max
double collision_window(const TimingParams& timing);

struct SelectionOutcome {
  std::size_t winner = 0;
  std::vector<double> timers;    ///< T_i in microseconds
  std::vector<double> h_values;
  bool collided = false;
  double window_us = 0.0;
};

/// One abstract selection round. The winner is the smallest timer (lowest
/// index on exact ties); the round collides when the runner-up expires
/// strictly less than `window_us` after the winner.
SelectionOutcome run_selection_round(Policy policy, double lambda_us,
                                     double window_us,
                                     std::span<const LinkGains> gains);

}  // namespace oprelay
