#pragma once

#include <cstdint>
#include <limits>
#include <utility>

namespace oprelay {

/// SplitMix64 finalizer; used for seeding and stream derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// xoshiro256++ generator with deterministic stream derivation.
///
/// Monte Carlo work is split into fixed trial chunks, and chunk k always
/// draws from `Rng::stream(seed, tag, k)`. Results therefore depend only on
/// (seed, tag, trial count), never on how many worker threads ran.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  /// Independent sub-stream `index` of experiment cell `tag` under `seed`.
  static Rng stream(std::uint64_t seed, std::uint64_t tag,
                    std::uint64_t index) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform on (0, 1], 53-bit resolution. Never returns 0, so log() is safe.
  double uniform() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  /// Exponential variate with the given mean.
  double exponential(double mean) noexcept;

  /// Two independent standard normals (Box-Muller, no cached state).
  std::pair<double, double> normal_pair() noexcept;

 private:
  std::uint64_t s_[4];
};

}  // namespace oprelay
