#pragma once

#include <cstdint>

namespace aoisim {

enum class EventKind {
  Arrival,     // one energy unit deposited
  Attempt,     // transmission attempt (consumed one unit)
  Skip,        // scheduled attempt with empty battery, nothing consumed
  Deplete,     // energy-removal policies discard the whole battery
  CycleReset,  // renewal cycle restart, battery reduced to one
};

enum class AttemptOutcome { Success, Erased, SkippedNoEnergy };

const char* to_string(EventKind kind);
const char* to_string(AttemptOutcome outcome);

/// One line of a path trace. Times are physical units. epoch_index is the
/// policy's absolute schedule-grid index (arrival ordinal for greedy);
/// attempt_index numbers retransmissions within one epoch from 1.
struct TraceEvent {
  double time = 0.0;
  EventKind kind = EventKind::Arrival;
  std::int64_t epoch_index = 0;
  int attempt_index = 0;
  AttemptOutcome outcome = AttemptOutcome::SkippedNoEnergy;
  std::int64_t battery_after = 0;
};

}  // namespace aoisim
