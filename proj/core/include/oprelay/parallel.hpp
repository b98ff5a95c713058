#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace oprelay {

/// Trials per deterministic chunk. Each chunk owns one random sub-stream.
inline constexpr std::uint64_t kTrialsPerChunk = 1u << 16;

/// Resolves a requested worker count; 0 means "all hardware threads".
inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs `body(chunk_index, first_trial, trial_count)` over fixed-size chunks
/// of `trials` and folds the per-chunk partials with `+=` in chunk order.
///
/// Chunk boundaries depend only on `trials`, so as long as `body` seeds its
/// generator from `chunk_index` the merged result is identical for any
/// `threads`, including floating-point sums.
template <class Partial, class Body>
Partial run_chunked(std::uint64_t trials, unsigned threads, Body&& body) {
  const std::uint64_t chunks = (trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  std::vector<Partial> partials(chunks);

  auto run_one = [&](std::uint64_t chunk) {
    const std::uint64_t first = chunk * kTrialsPerChunk;
    const std::uint64_t count = std::min(kTrialsPerChunk, trials - first);
    partials[chunk] = body(chunk, first, count);
  };

  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_threads(threads), std::max<std::uint64_t>(chunks, 1)));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_one(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        try {
          for (std::uint64_t c = next++; c < chunks; c = next++) run_one(c);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = chunks;
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  Partial total{};
  for (auto& p : partials) total += p;
  return total;
}

}  // namespace oprelay
