#include "ragds/gateway/limiter.hpp"

#include <algorithm>
#include <stdexcept>

namespace ragds::gateway {

ConcurrencyLimiter::ConcurrencyLimiter(int max_concurrent) : max_(max_concurrent) {
  if (max_concurrent < 1) throw std::invalid_argument("max_concurrent must be >= 1");
}

ConcurrencyLimiter::Permit::Permit(ConcurrencyLimiter& limiter) : limiter_(limiter) {
  limiter_.lock_slot();
}

ConcurrencyLimiter::Permit::~Permit() { limiter_.unlock_slot(); }

void ConcurrencyLimiter::lock_slot() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return in_flight_ < max_; });
  ++in_flight_;
  high_water_ = std::max(high_water_, in_flight_);
}

void ConcurrencyLimiter::unlock_slot() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

int ConcurrencyLimiter::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

int ConcurrencyLimiter::high_water() const {
  std::lock_guard lock(mu_);
  return high_water_;
}

}  // namespace ragds::gateway
