#pragma once

#include <atomic>

#include "twcrawl/time.hpp"

namespace twcrawl {

// Source of "now" for everything that paces or timestamps. Crawls, rate
// windows and ledger entries all read time through this interface so tests
// can run days of virtual time in milliseconds.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
  virtual void sleep_for(Millis d) = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
  void sleep_for(Millis d) override;
};

// Manually driven clock. sleep_for advances time instantly.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start) : now_ms_(to_epoch_ms(start)) {}

  Timestamp now() const override { return from_epoch_ms(now_ms_.load()); }
  void sleep_for(Millis d) override { advance(d); }

  void advance(Millis d) {
    if (d.count() > 0) now_ms_.fetch_add(d.count());
  }
  void set(Timestamp t) { now_ms_.store(to_epoch_ms(t)); }

 private:
  std::atomic<std::int64_t> now_ms_;
};

}  // namespace twcrawl
