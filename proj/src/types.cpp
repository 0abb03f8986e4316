#include "aoisim/types.hpp"

#include <cmath>
#include <sstream>

namespace aoisim {

const char* to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Bu: return "bu";
    case PolicyKind::Bur: return "bur";
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::BuEr: return "bu_er";
    case PolicyKind::BurEr: return "bur_er";
    case PolicyKind::ConstantRenewal: return "const_renewal";
  }
  return "?";
}

const char* to_string(Feedback fb) {
  return fb == Feedback::None ? "none" : "perfect";
}

PolicyKind policy_from_string(std::string_view name) {
  if (name == "bu") return PolicyKind::Bu;
  if (name == "bur") return PolicyKind::Bur;
  if (name == "greedy") return PolicyKind::Greedy;
  if (name == "bu_er") return PolicyKind::BuEr;
  if (name == "bur_er") return PolicyKind::BurEr;
  if (name == "const_renewal") return PolicyKind::ConstantRenewal;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

Feedback feedback_from_string(std::string_view name) {
  if (name == "none") return Feedback::None;
  if (name == "perfect") return Feedback::Perfect;
  throw ConfigError("unknown feedback mode '" + std::string(name) + "'");
}

Feedback required_feedback(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Bur:
    case PolicyKind::BurEr:
    case PolicyKind::ConstantRenewal:
      return Feedback::Perfect;
    default:
      return Feedback::None;
  }
}

bool is_energy_removal(PolicyKind kind) {
  return kind == PolicyKind::BuEr || kind == PolicyKind::BurEr;
}

SpacingRule SpacingRule::constant(double value) {
  return SpacingRule{{value}, Tail::Constant};
}

SpacingRule SpacingRule::linear(double slope) {
  return SpacingRule{{slope, 2.0 * slope}, Tail::Arithmetic};
}

double SpacingRule::at(std::size_t k) const {
  const std::size_t m = prefix.size();
  if (k == 0) throw std::invalid_argument("SpacingRule::at is 1-based");
  if (k <= m) return prefix[k - 1];
  const double last = prefix.back();
  switch (tail) {
    case Tail::Constant:
      return last;
    case Tail::Arithmetic: {
      const double step = m >= 2 ? last - prefix[m - 2] : 0.0;
      return last + step * static_cast<double>(k - m);
    }
    case Tail::Geometric: {
      const double ratio = m >= 2 ? last / prefix[m - 2] : 1.0;
      return last * std::pow(ratio, static_cast<double>(k - m));
    }
  }
  return last;
}

void SpacingRule::validate() const {
  if (prefix.empty()) throw ConfigError("spacings: empty prefix");
  double prev = 0.0;
  for (double x : prefix) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ConfigError("spacings: entries must be positive and finite");
    }
    if (x < prev) throw ConfigError("spacings: sequence must be non-decreasing");
    prev = x;
  }
}

void SimConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be > 0");
  if (!(p > 0.0) || p > 1.0) throw ConfigError("p must be in (0, 1]");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be > 0");
  if (initial_energy < 0) throw ConfigError("e0 must be non-negative");
  if (n_paths < 1) throw ConfigError("paths must be >= 1");
  if (checkpoints < 1) throw ConfigError("checkpoints must be >= 1");

  const PolicyKind kind = policy.kind;
  if (feedback != required_feedback(kind)) {
    throw ConfigError(std::string("feedback mode '") + to_string(feedback) +
                      "' does not match policy '" + to_string(kind) + "'");
  }
  if (is_energy_removal(kind)) {
    if (!policy.t0) throw ConfigError("t0 is required for energy-removal policies");
    if (!(*policy.t0 > 0.0)) throw ConfigError("t0 must be > 0");
    // The two-stage cycle analysis assumes each cycle starts with one unit.
    if (initial_energy != 1) throw ConfigError("e0 must be 1 for energy-removal policies");
  } else if (policy.t0) {
    throw ConfigError(std::string("t0 is only valid for energy-removal policies, not '") +
                      to_string(kind) + "'");
  }
  if (kind == PolicyKind::Bu || kind == PolicyKind::Bur) {
    if (initial_energy < 1) throw ConfigError("e0 must be >= 1 for scheduled policies");
  }
  if (kind == PolicyKind::ConstantRenewal) {
    if (!policy.spacings) throw ConfigError("spacings are required for const_renewal");
    policy.spacings->validate();
  } else if (policy.spacings) {
    throw ConfigError("spacings are only valid for const_renewal");
  }
}

std::vector<double> SimConfig::checkpoint_times() const {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(checkpoints));
  if (checkpoints == 1) {
    times.push_back(horizon);
    return times;
  }
  const double lo = horizon / 1000.0;
  for (int i = 0; i < checkpoints; ++i) {
    const double frac = static_cast<double>(i) / (checkpoints - 1);
    times.push_back(lo * std::pow(1000.0, frac));
  }
  times.back() = horizon;  // exact endpoint
  return times;
}

}  // namespace aoisim
