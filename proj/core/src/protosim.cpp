#include "oprelay/protosim.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "oprelay/errors.hpp"

namespace oprelay {
namespace {

// Same-instant ordering: expiries run before receptions, so a flag that
// lands exactly when a timer runs out does not stop that relay.
enum class EventKind : int { CtsArrival = 0, TimerExpiry = 1, DestinationHears = 2, Reception = 3 };

struct Event {
  double time;
  EventKind kind;
  std::size_t relay;

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return static_cast<int>(kind) > static_cast<int>(o.kind);
    return relay > o.relay;
  }
};

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

constexpr double kSlack = 1e-9;

void check_within(double actual, double declared, const char* what) {
  if (actual > declared * (1.0 + kSlack) + kSlack)
    throw ArgumentError(std::string("simulate_round: geometry exceeds declared ") + what);
}

}  // namespace

double PropagationDelays::max_relay_dest() const noexcept {
  double m = 0.0;
  for (double v : relay_dest_us) m = std::max(m, v);
  return m;
}

double PropagationDelays::max_relay_relay() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < relay_relay_us.size(); ++i)
    for (std::size_t j = 0; j < relay_relay_us[i].size(); ++j)
      if (i != j) m = std::max(m, relay_relay_us[i][j]);
  return m;
}

double PropagationDelays::max_cts_skew() const noexcept {
  if (relay_dest_us.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(relay_dest_us.begin(), relay_dest_us.end());
  return *hi - *lo;
}

PropagationDelays propagation_delays(const NodeGeometry& g) {
  if (!(g.signal_speed_m_per_us > 0.0))
    throw ArgumentError("geometry: signal speed must be > 0");
  PropagationDelays d;
  const std::size_t m = g.relays.size();
  d.relay_dest_us.resize(m);
  d.relay_relay_us.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    d.relay_dest_us[i] = distance(g.relays[i], g.destination) / g.signal_speed_m_per_us;
    for (std::size_t j = 0; j < m; ++j)
      d.relay_relay_us[i][j] = distance(g.relays[i], g.relays[j]) / g.signal_speed_m_per_us;
  }
  return d;
}

PropagationDelays uniform_delays(std::size_t relays, double relay_dest_us,
                                 double relay_relay_us) {
  if (!(relay_dest_us >= 0.0) || !(relay_relay_us >= 0.0))
    throw DomainError("uniform_delays: delays must be >= 0");
  PropagationDelays d;
  d.relay_dest_us.assign(relays, relay_dest_us);
  d.relay_relay_us.assign(relays, std::vector<double>(relays, relay_relay_us));
  for (std::size_t i = 0; i < relays; ++i) d.relay_relay_us[i][i] = 0.0;
  return d;
}

TimingParams timing_for(const PropagationDelays& delays, double switch_us,
                        double flag_duration_us, bool hidden) {
  TimingParams t;
  t.r_max_us = hidden ? 0.0 : delays.max_relay_relay();
  t.n_max_us = delays.max_relay_dest();
  t.cts_skew_max_us = delays.max_cts_skew();
  t.switch_us = switch_us;
  t.flag_duration_us = flag_duration_us;
  t.hidden = hidden;
  t.validate();
  return t;
}

RoundTrace simulate_round(const PropagationDelays& delays, const TimingParams& timing,
                          Policy policy, double lambda_us,
                          std::span<const LinkGains> gains) {
  const std::size_t m = delays.relays();
  if (m == 0) throw ArgumentError("simulate_round: no relays");
  if (gains.size() != m) throw ArgumentError("simulate_round: one gain pair per relay required");
  if (delays.relay_relay_us.size() != m)
    throw ArgumentError("simulate_round: relay-relay delay matrix has wrong size");
  for (const auto& row : delays.relay_relay_us)
    if (row.size() != m) throw ArgumentError("simulate_round: relay-relay delay matrix is not square");
  for (double v : delays.relay_dest_us)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("simulate_round: negative delay");
  for (const auto& row : delays.relay_relay_us)
    for (double v : row)
      if (!(v >= 0.0) || !std::isfinite(v)) throw ArgumentError("simulate_round: negative delay");
  timing.validate();
  check_within(delays.max_relay_dest(), timing.n_max_us, "n_max");
  check_within(delays.max_cts_skew(), timing.cts_skew_max_us, "CTS skew");
  if (!timing.hidden) check_within(delays.max_relay_relay(), timing.r_max_us, "r_max");

  RoundTrace trace;
  // Abstract view of the same gains, with the worst-case window.
  trace.outcome = run_selection_round(policy, lambda_us, collision_window(timing), gains);
  trace.relays.resize(m);

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  for (std::size_t j = 0; j < m; ++j) {
    auto& r = trace.relays[j];
    r.cts_arrival_us = delays.relay_dest_us[j];
    r.timer_us = trace.outcome.timers[j];
    r.scheduled_fire_us = r.cts_arrival_us + r.timer_us;
    queue.push({r.cts_arrival_us, EventKind::CtsArrival, j});
  }

  bool destination_notified = false;
  const double ds = timing.switch_us;

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    auto& relay = trace.relays[ev.relay];
    switch (ev.kind) {
      case EventKind::CtsArrival:
        if (!relay.heard_us && std::isfinite(relay.scheduled_fire_us))
          queue.push({relay.scheduled_fire_us, EventKind::TimerExpiry, ev.relay});
        break;

      case EventKind::TimerExpiry:
        if (relay.heard_us) break;
        relay.fired_us = ev.time;
        if (trace.fired_count++ == 0) {
          trace.first_fired = ev.relay;
          trace.first_fire_us = ev.time;
        }
        if (timing.hidden) {
          queue.push({ev.time + ds + delays.relay_dest_us[ev.relay] + timing.flag_duration_us,
                      EventKind::DestinationHears, ev.relay});
        } else {
          for (std::size_t k = 0; k < m; ++k)
            if (k != ev.relay)
              queue.push({ev.time + ds + delays.relay_relay_us[ev.relay][k],
                          EventKind::Reception, k});
        }
        break;

      case EventKind::DestinationHears:
        if (destination_notified) break;
        destination_notified = true;
        for (std::size_t k = 0; k < m; ++k)
          queue.push({ev.time + ds + delays.relay_dest_us[k], EventKind::Reception, k});
        break;

      case EventKind::Reception:
        if (!relay.fired_us && !relay.heard_us) relay.heard_us = ev.time;
        break;
    }
  }

  trace.outcome.collided = trace.fired_count >= 2;
  return trace;
}

RoundTrace simulate_round(const NodeGeometry& geometry, const TimingParams& timing,
                          Policy policy, double lambda_us,
                          std::span<const LinkGains> gains) {
  return simulate_round(propagation_delays(geometry), timing, policy, lambda_us, gains);
}

}  // namespace oprelay
