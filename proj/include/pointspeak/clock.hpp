#pragma once

#include <chrono>
#include <mutex>
#include <thread>

namespace pointspeak {

// Seconds on a monotonic timeline. Live code uses SteadyClock; replays and
// tests drive a VirtualClock by hand.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;
  virtual void sleep_until(double t) = 0;
};

class SteadyClock final : public Clock {
 public:
  SteadyClock() : origin_(std::chrono::steady_clock::now()) {}

  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
  }
  void sleep_until(double t) override {
    std::this_thread::sleep_until(origin_ + std::chrono::duration_cast<std::chrono::nanoseconds>(
                                                std::chrono::duration<double>(t)));
  }

 private:
  std::chrono::steady_clock::time_point origin_;
};

class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(double start = 0.0) : now_(start) {}

  double now() const override {
    std::lock_guard lock(mutex_);
    return now_;
  }
  // Jumps forward instead of blocking.
  void sleep_until(double t) override {
    std::lock_guard lock(mutex_);
    if (t > now_) now_ = t;
  }
  void advance(double dt) {
    std::lock_guard lock(mutex_);
    now_ += dt;
  }

 private:
  mutable std::mutex mutex_;
  double now_;
};

}  // namespace pointspeak
