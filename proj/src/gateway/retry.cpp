#include "ragds/gateway/retry.hpp"

#include <algorithm>

namespace ragds::gateway {

Backoff::Backoff(std::chrono::milliseconds base, std::uint64_t jitter_seed)
    : base_(base), rng_(jitter_seed) {}

std::chrono::milliseconds Backoff::nominal(std::chrono::milliseconds base, int retry_index) {
  // Cap the exponent so the shift cannot overflow.
  const int exp = std::clamp(retry_index, 0, 20);
  return base * (std::int64_t{1} << exp);
}

std::chrono::milliseconds Backoff::delay(int retry_index) {
  std::chrono::milliseconds jitter{0};
  if (base_.count() > 0) {
    std::lock_guard lock(mu_);
    jitter = std::chrono::milliseconds(static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(base_.count())));
  }
  return nominal(base_, retry_index) + jitter;
}

}  // namespace ragds::gateway
