#pragma once

#include <cstdint>

#include "aoisim/types.hpp"

namespace aoisim {

// Infinite-capacity energy queue in whole units.
struct BatteryState {
  std::int64_t level = 0;
};

inline BatteryState battery_deposit(BatteryState state, std::int64_t arrivals) {
  if (arrivals < 0) throw SimulationError("battery_deposit: negative arrival count");
  state.level += arrivals;
  return state;
}

// One update attempt costs one unit; callers must ensure level >= 1.
inline BatteryState battery_consume(BatteryState state) {
  if (state.level < 1) {
    throw EnergyCausalityError("battery_consume: attempt with empty battery");
  }
  state.level -= 1;
  return state;
}

inline BatteryState battery_deplete(BatteryState state) {
  state.level = 0;
  return state;
}

inline BatteryState battery_reduce_to_one(BatteryState state) {
  state.level = 1;
  return state;
}

}  // namespace aoisim
