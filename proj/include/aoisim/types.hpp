#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoisim {

/// Raised for malformed experiment configurations (CLI exit code 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a simulation invariant is violated mid-path (CLI exit code 2).
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An update attempt was issued with an empty battery. This is a programming
/// error in a policy driver, never a recoverable condition.
struct EnergyCausalityError : SimulationError {
  using SimulationError::SimulationError;
};

enum class PolicyKind {
  Bu,               // attempt once per unit-spaced epoch, skip when empty
  Bur,              // retransmit at epochs spaced 1/p until success or empty
  Greedy,           // attempt at every energy arrival
  BuEr,             // BU with energy removal (two-stage renewal cycles)
  BurEr,            // BUR with energy removal
  ConstantRenewal,  // user-supplied inter-attempt spacings after each success
};

enum class Feedback { None, Perfect };

const char* to_string(PolicyKind kind);
const char* to_string(Feedback fb);
PolicyKind policy_from_string(std::string_view name);
Feedback feedback_from_string(std::string_view name);

/// Feedback mode a policy needs to be physically realizable (ER variants are
/// analysis devices and keep their parent's mode; BU-ER's stage trigger is a
/// simulator-level observation).
Feedback required_feedback(PolicyKind kind);

/// True for the two-stage energy-removal variants.
bool is_energy_removal(PolicyKind kind);

/// Inter-attempt spacing family used by the constant-renewal policy and the
/// renewal objective. A finite non-decreasing positive prefix x_1..x_m is
/// extended past the prefix by the tail rule.
struct SpacingRule {
  enum class Tail { Constant, Arithmetic, Geometric };

  std::vector<double> prefix;
  Tail tail = Tail::Constant;

  static SpacingRule constant(double value);
  static SpacingRule linear(double slope);  // x_k = slope * k

  /// Spacing x_k, 1-based.
  double at(std::size_t k) const;
  void validate() const;

  bool operator==(const SpacingRule&) const = default;
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::Bu;
  std::optional<double> t0;            // energy-removal deadline, ER kinds only
  std::optional<SpacingRule> spacings; // ConstantRenewal only

  bool operator==(const PolicySpec&) const = default;
};

/// Full parameterization of one simulation cell. Times are physical units;
/// the engine rescales internally so that the energy arrival rate is one.
struct SimConfig {
  double lambda = 1.0;            // energy arrival rate, > 0
  double p = 1.0;                 // per-attempt success probability, (0, 1]
  double horizon = 0.0;           // simulation end time, > 0
  std::int64_t initial_energy = 1;
  PolicySpec policy;
  Feedback feedback = Feedback::None;
  std::int64_t n_paths = 1;
  std::uint64_t seed = 0;
  int checkpoints = 32;           // convergence-series sample count
  bool record_trace = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Geometric checkpoint grid from horizon/1000 to horizon (physical time);
  /// the last point is exactly the horizon.
  std::vector<double> checkpoint_times() const;

  bool operator==(const SimConfig&) const = default;
};

}  // namespace aoisim
