#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "oprelay/relay_select.hpp"

namespace oprelay {

struct Point {
  double x = 0.0;  ///< metres
  double y = 0.0;
};

/// Node placement for one selection round.
struct NodeGeometry {
  Point source;
  Point destination;
  std::vector<Point> relays;
  double signal_speed_m_per_us = 299.792458;
};

/// One-way propagation delays, microseconds.
struct PropagationDelays {
  std::vector<double> relay_dest_us;                 ///< n_j
  std::vector<std::vector<double>> relay_relay_us;   ///< r_ij

  std::size_t relays() const noexcept { return relay_dest_us.size(); }
  double max_relay_dest() const noexcept;
  double max_relay_relay() const noexcept;
  double max_cts_skew() const noexcept;
};

/// Delays implied by distances / signal speed.
PropagationDelays propagation_delays(const NodeGeometry& geometry);

/// Every relay n_us from the destination and r_us from every other relay.
/// Not realizable in the plane for more than three relays, but it is the
/// configuration in which the event model reduces exactly to one window c.
PropagationDelays uniform_delays(std::size_t relays, double relay_dest_us,
                                 double relay_relay_us);

/// Timing budget whose maxima are the actual maxima of `delays`.
TimingParams timing_for(const PropagationDelays& delays, double switch_us,
                        double flag_duration_us, bool hidden);

struct RelayTrace {
  double cts_arrival_us = 0.0;       ///< t_j = n_j
  double timer_us = 0.0;             ///< T_j (may be +inf)
  double scheduled_fire_us = 0.0;    ///< t_j + T_j
  std::optional<double> fired_us;    ///< set iff the relay transmitted a flag
  std::optional<double> heard_us;    ///< flag (or broadcast) reception that made it back off
};

struct RoundTrace {
  std::vector<RelayTrace> relays;
  std::optional<std::size_t> first_fired;
  double first_fire_us = 0.0;
  std::size_t fired_count = 0;
  /// winner = argmin T_i; collided = two or more relays fired;
  /// window_us = collision_window(timing).
  SelectionOutcome outcome;
};

/// Event-driven execution of one round. CTS reaches relay j at n_j and starts
/// its timer; it fires at n_j + T_j unless, strictly earlier, it has heard
///   visible relays: a flag, arriving fire_i + d_s + r_ij, or
///   hidden relays:  the destination broadcast, arriving
///                   fire_i + d_s + n_i + dur + d_s + n_j
///                   (triggered once, by the first flag to reach the destination).
/// A reception at exactly the fire instant does not suppress firing.
/// Throws ArgumentError if the delays exceed the declared timing maxima or if
/// the gain list does not match the relay count.
RoundTrace simulate_round(const PropagationDelays& delays, const TimingParams& timing,
                          Policy policy, double lambda_us,
                          std::span<const LinkGains> gains);

RoundTrace simulate_round(const NodeGeometry& geometry, const TimingParams& timing,
                          Policy policy, double lambda_us,
                          std::span<const LinkGains> gains);

}  // namespace oprelay
