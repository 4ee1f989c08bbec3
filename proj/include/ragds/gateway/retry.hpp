#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <random>

namespace ragds::gateway {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Exponential backoff: the delay before retry n (n = 0 for the first
/// retry) is base * 2^n plus a uniform jitter in [0, base).
class Backoff {
 public:
  Backoff(std::chrono::milliseconds base, std::uint64_t jitter_seed);

  std::chrono::milliseconds delay(int retry_index);

  /// The deterministic part, without jitter.
  static std::chrono::milliseconds nominal(std::chrono::milliseconds base, int retry_index);

 private:
  std::chrono::milliseconds base_;
  std::mutex mu_;
  std::mt19937_64 rng_;
};

}  // namespace ragds::gateway
