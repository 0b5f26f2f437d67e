#include "twcrawl/clock.hpp"

#include <thread>

namespace twcrawl {

Timestamp SystemClock::now() const {
  return std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
}

void SystemClock::sleep_for(Millis d) {
  if (d.count() > 0) std::this_thread::sleep_for(d);
}

}  // namespace twcrawl
