#pragma once

#include <cstdint>
#include <limits>
#include <memory>

#include "aoisim/types.hpp"

namespace aoisim {

/// Services a policy sees while driving one sample path. Implemented by the
/// engine; all times are internal (unit arrival rate). Policies never touch
/// the battery or the channel directly, so energy causality and AoI
/// accounting are enforced in one place.
class PathContext {
 public:
  virtual ~PathContext() = default;

  virtual std::int64_t battery() const = 0;

  /// One transmission attempt: consumes one energy unit, draws the channel
  /// outcome pre-committed for (epoch_index, attempt_index), records the
  /// event, and resets the age on success. Returns whether it succeeded.
  /// Throws EnergyCausalityError if the battery is empty.
  virtual bool attempt(double t, std::int64_t epoch_index, int attempt_index) = 0;

  /// Record a scheduled attempt that found the battery empty.
  virtual void skip_no_energy(double t, std::int64_t epoch_index) = 0;

  /// Discard all stored energy (energy-removal trigger).
  virtual void deplete(double t) = 0;

  /// Reduce the battery to exactly one unit at a renewal-cycle reset.
  virtual void reduce_to_one(double t) = 0;

  // Renewal-cycle bookkeeping for ER policies.
  virtual void mark_stage_boundary(double t) = 0;
  virtual void mark_cycle_reset(double t, std::int64_t stage2_epochs) = 0;

  virtual double last_success_time() const = 0;
};

constexpr double kNever = std::numeric_limits<double>::infinity();

/// One updating policy's decision state machine.
class PolicyDriver {
 public:
  virtual ~PolicyDriver() = default;

  /// Absolute internal time of the next policy-scheduled event, or kNever
  /// for purely arrival-driven policies.
  virtual double next_scheduled() const = 0;

  /// Execute the event returned by next_scheduled().
  virtual void on_scheduled(PathContext& ctx, double t) = 0;

  /// Called right after an energy arrival at time t has been deposited.
  virtual void on_arrival(PathContext& ctx, double t) { (void)ctx; (void)t; }
};

/// Builds the driver for a validated config. t0 and spacings are expected in
/// internal time (already rescaled by lambda).
std::unique_ptr<PolicyDriver> make_policy(const PolicySpec& spec, double success_prob);

}  // namespace aoisim
