#pragma once

#include <cstdint>
#include <stdexcept>

namespace nemo {

/// Monotone simulated clock, microsecond resolution. All connector latency
/// and rate-limit sleeps act on this clock, so timings are machine-independent.
class SimClock {
  public:
    std::int64_t now_us() const { return now_us_; }
    double now_seconds() const { return static_cast<double>(now_us_) / 1e6; }

    void advance_us(std::int64_t d) {
        if (d < 0) throw std::logic_error("SimClock cannot go backwards");
        now_us_ += d;
    }
    void advance_seconds(double s) { advance_us(static_cast<std::int64_t>(s * 1e6)); }

  private:
    std::int64_t now_us_ = 0;
};

struct RateLimitPolicy {
    long max_requests = 350;
    std::int64_t window_us = 3600LL * 1000000LL;  // one hour
};

/// Fixed-window request budget: windows are [k*W, (k+1)*W) on the simulated
/// clock. Exhausting a window jumps the clock to the next boundary instead
/// of sleeping in wall time.
class RateLimiter {
  public:
    RateLimiter(RateLimitPolicy policy, SimClock& clock) : policy_(policy), clock_(&clock) {
        if (policy_.max_requests < 1) throw std::invalid_argument("max_requests must be >= 1");
        if (policy_.window_us < 1) throw std::invalid_argument("window must be positive");
    }

    /// Takes one request token, rolling the clock forward when exhausted.
    void acquire() {
        roll_window();
        if (used_in_window_ >= policy_.max_requests) {
            const std::int64_t boundary = (window_index_ + 1) * policy_.window_us;
            clock_->advance_us(boundary - clock_->now_us());
            ++window_index_;
            used_in_window_ = 0;
            ++windows_crossed_;
        }
        ++used_in_window_;
        ++total_acquired_;
    }

    long total_acquired() const { return total_acquired_; }
    long windows_crossed() const { return windows_crossed_; }
    const RateLimitPolicy& policy() const { return policy_; }

  private:
    void roll_window() {
        const std::int64_t idx = clock_->now_us() / policy_.window_us;
        if (idx != window_index_) {
            window_index_ = idx;
            used_in_window_ = 0;
        }
    }

    RateLimitPolicy policy_;
    SimClock* clock_;
    std::int64_t window_index_ = 0;
    long used_in_window_ = 0;
    long total_acquired_ = 0;
    long windows_crossed_ = 0;
};

}  // namespace nemo
