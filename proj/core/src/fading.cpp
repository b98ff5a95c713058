#include "oprelay/fading.hpp"

#include <cmath>

#include "oprelay/errors.hpp"

namespace oprelay {

FadingModel::FadingModel(FadingKind kind, double k_factor, double mean_power)
    : kind_(kind), k_factor_(k_factor), mean_power_(mean_power) {
  if (!(mean_power > 0.0) || !std::isfinite(mean_power))
    throw DomainError("fading: mean_power must be finite and > 0");
  if (!(k_factor >= 0.0) || !std::isfinite(k_factor))
    throw DomainError("fading: k_factor must be finite and >= 0");
  if (kind == FadingKind::Rayleigh && k_factor != 0.0)
    throw DomainError("fading: Rayleigh model requires k_factor = 0");
  los_amplitude_ = std::sqrt(k_factor / (k_factor + 1.0) * mean_power);
  scatter_sigma_ = std::sqrt(mean_power / (k_factor + 1.0) / 2.0);
}

FadingModel FadingModel::rayleigh(double mean_power) {
  return FadingModel(FadingKind::Rayleigh, 0.0, mean_power);
}

FadingModel FadingModel::ricean(double k_factor, double mean_power) {
  return FadingModel(FadingKind::Ricean, k_factor, mean_power);
}

FadingModel FadingModel::with_mean_power(double mean_power) const {
  return FadingModel(kind_, k_factor_, mean_power);
}

double FadingModel::sample(Rng& rng) const noexcept {
  if (kind_ == FadingKind::Rayleigh) return rng.exponential(mean_power_);
  const auto [n1, n2] = rng.normal_pair();
  const double in_phase = los_amplitude_ + scatter_sigma_ * n1;
  const double quadrature = scatter_sigma_ * n2;
  return in_phase * in_phase + quadrature * quadrature;
}

RelayProfile::RelayProfile(double beta1, double beta2)
    : beta1_(beta1), beta2_(beta2) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !std::isfinite(beta1) ||
      !std::isfinite(beta2))
    throw DomainError("relay profile: beta1 and beta2 must be finite and > 0");
}

double beta_from_distance(double distance_ratio, double exponent) {
  if (!(distance_ratio > 0.0) || !(exponent > 0.0))
    throw DomainError("beta_from_distance: arguments must be > 0");
  return std::pow(distance_ratio, exponent);
}

std::string_view to_string(TopologyCase c) noexcept {
  switch (c) {
    case TopologyCase::Midway: return "Midway";
    case TopologyCase::Third: return "Third";
    case TopologyCase::Tenth: return "Tenth";
    case TopologyCase::Line: return "Line";
    case TopologyCase::Custom: return "Custom";
  }
  return "Custom";
}

bool Topology::identical() const noexcept {
  for (const auto& p : profiles)
    if (!(p == profiles.front())) return false;
  return true;
}

Topology make_topology(TopologyCase which, double exponent, std::size_t relays) {
  if (relays == 0) throw ArgumentError("topology: at least one relay required");
  if (!(exponent > 0.0)) throw DomainError("topology: path-loss exponent must be > 0");

  Topology topo;
  topo.case_id = which;
  topo.exponent = exponent;
  topo.profiles.reserve(relays);

  // Distance from the source as a fraction of d; both hops normalized by d/2.
  auto place = [&](double fraction) {
    topo.profiles.emplace_back(beta_from_distance(2.0 * fraction, exponent),
                               beta_from_distance(2.0 * (1.0 - fraction), exponent));
  };

  switch (which) {
    case TopologyCase::Midway:
      for (std::size_t i = 0; i < relays; ++i) place(0.5);
      break;
    case TopologyCase::Third:
      for (std::size_t i = 0; i < relays; ++i) place(1.0 / 3.0);
      break;
    case TopologyCase::Tenth:
      for (std::size_t i = 0; i < relays; ++i) place(0.1);
      break;
    case TopologyCase::Line:
      for (std::size_t k = 1; k <= relays; ++k)
        place(static_cast<double>(k) / static_cast<double>(relays + 1));
      break;
    case TopologyCase::Custom:
      throw ArgumentError("topology: Custom placements are built from explicit profiles");
  }
  return topo;
}

}  // namespace oprelay
