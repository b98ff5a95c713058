#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "oprelay/rng.hpp"

namespace oprelay {

enum class FadingKind { Rayleigh, Ricean };

/// Distribution of one link's power gain |a|^2.
///
/// Rayleigh: |a|^2 ~ Exponential(mean_power).
/// Ricean:   |a|^2 = |g|^2 with g complex Gaussian, deterministic component of
///           power K/(K+1) * mean_power and scattered power mean_power/(K+1).
///           K = 0 degenerates to Rayleigh.
class FadingModel {
 public:
  static FadingModel rayleigh(double mean_power = 1.0);
  static FadingModel ricean(double k_factor, double mean_power = 1.0);

  FadingKind kind() const noexcept { return kind_; }
  double k_factor() const noexcept { return k_factor_; }
  double mean_power() const noexcept { return mean_power_; }

  /// Same shape, different mean power (path loss applied to a base model).
  FadingModel with_mean_power(double mean_power) const;

  double sample(Rng& rng) const noexcept;

 private:
  FadingModel(FadingKind kind, double k_factor, double mean_power);

  FadingKind kind_;
  double k_factor_;
  double mean_power_;
  double los_amplitude_;    // sqrt of deterministic-component power
  double scatter_sigma_;    // per-quadrature std-dev of the scattered part
};

/// One draw of |a|^2.
inline double sample_power_gain(const FadingModel& model, Rng& rng) noexcept {
  return model.sample(rng);
}

/// Rate parameters of the two hops of one relay: E|a_sr|^2 = 1/beta1,
/// E|a_rd|^2 = 1/beta2.
class RelayProfile {
 public:
  RelayProfile(double beta1, double beta2);

  double beta1() const noexcept { return beta1_; }
  double beta2() const noexcept { return beta2_; }

  friend bool operator==(const RelayProfile&, const RelayProfile&) = default;

 private:
  double beta1_;
  double beta2_;
};

/// beta = distance_ratio^exponent, i.e. mean power (1/distance_ratio)^exponent.
double beta_from_distance(double distance_ratio, double exponent);

enum class TopologyCase { Midway, Third, Tenth, Line, Custom };

std::string_view to_string(TopologyCase c) noexcept;

/// Relay placement between a source and destination a distance d apart.
/// Distances are normalized by d/2, so the midway cluster has beta = 1.
struct Topology {
  TopologyCase case_id = TopologyCase::Custom;
  double exponent = 1.0;
  std::vector<RelayProfile> profiles;

  std::size_t relays() const noexcept { return profiles.size(); }
  /// True when every relay shares one (beta1, beta2) pair.
  bool identical() const noexcept;
};

/// Named placement with `relays` relays.
///   Midway: cluster at d/2.    Third: cluster at d/3.    Tenth: cluster at d/10.
///   Line:   relays at k*d/(M+1), k = 1..M.
Topology make_topology(TopologyCase which, double exponent, std::size_t relays);

}  // namespace oprelay
