#pragma once

#include <cstdint>

namespace edgesim {

// Simulated time is measured in integer ticks; one tick is 60 simulated
// seconds, so a day is 1440 ticks. Encoded timestamps (JSON payloads, store
// dumps) are seconds since epoch 0.
using Tick = std::int64_t;

inline constexpr std::int64_t kTickSeconds = 60;
inline constexpr Tick kTicksPerDay = 1440;

constexpr std::int64_t tick_to_seconds(Tick t) { return t * kTickSeconds; }
constexpr Tick seconds_to_tick(std::int64_t s) { return s / kTickSeconds; }

constexpr Tick tick_of_day(Tick t) {
  return ((t % kTicksPerDay) + kTicksPerDay) % kTicksPerDay;
}

}  // namespace edgesim
