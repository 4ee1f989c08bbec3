#pragma once

#include <condition_variable>
#include <mutex>

namespace ragds::gateway {

/// Counting limiter on in-flight requests; also records the high-water mark.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int max_concurrent);

  class Permit {
   public:
    explicit Permit(ConcurrencyLimiter& limiter);
    ~Permit();
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;

   private:
    ConcurrencyLimiter& limiter_;
  };

  Permit acquire() { return Permit(*this); }

  int in_flight() const;
  int high_water() const;

 private:
  void lock_slot();
  void unlock_slot();

  const int max_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int high_water_ = 0;
};

}  // namespace ragds::gateway
