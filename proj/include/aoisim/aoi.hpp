#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "aoisim/stats.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

/// Destination-side age-of-information bookkeeping along one sample path.
///
/// The age starts at zero (an update is delivered right before time zero) and
/// resets to zero at each successful delivery. Two routes to the cumulative
/// age integral are maintained in parallel: a piecewise trapezoid integral
/// advanced at every sampling instant, and the closed form
/// (sum of squared inter-success gaps + closing term) / 2. finalize() checks
/// that they agree to 1e-9 relative.
class AoiAccumulator {
 public:
  /// Advance the trapezoid integral to time t without changing the age.
  void integrate_to(double t) {
    if (t < cursor_) throw SimulationError("AoiAccumulator: time moved backwards");
    const double age_lo = cursor_ - last_success_;
    const double age_hi = t - last_success_;
    integral_.add(0.5 * (age_lo + age_hi) * (t - cursor_));
    cursor_ = t;
  }

  void record_success(double t) {
    if (t < last_success_) {
      throw std::invalid_argument("AoiAccumulator: non-monotone success timestamp");
    }
    integrate_to(t);
    const double gap = t - last_success_;
    gap_sum_.add(gap);
    gap_sq_sum_.add(gap * gap);
    last_success_ = t;
    ++n_success_;
  }

  void note_attempt() { ++n_attempts_; }

  double last_success_time() const { return last_success_; }
  double age_at(double t) const { return t - last_success_; }
  std::int64_t success_count() const { return n_success_; }
  std::int64_t attempt_count() const { return n_attempts_; }
  double gap_sum() const { return gap_sum_.value(); }
  double gap_square_sum() const { return gap_sq_sum_.value(); }

  /// Closed-form cumulative age over [0, T]: (sum X_i^2 + (T - S_N)^2) / 2.
  double closed_form_area(double T) const {
    const double closing = T - last_success_;
    return 0.5 * (gap_sq_sum_.value() + closing * closing);
  }

  double integrated_area() const { return integral_.value(); }

  /// Time-average age over [0, T]. Requires T > 0 and T >= last success.
  /// Cross-checks the two area routes; the relative disagreement is stored
  /// and a SimulationError is raised beyond 1e-9.
  double finalize(double T) {
    if (T <= 0.0) throw std::invalid_argument("AoiAccumulator: horizon must be positive");
    if (T < last_success_) {
      throw std::invalid_argument("AoiAccumulator: horizon precedes last success");
    }
    integrate_to(T);
    const double closed = closed_form_area(T);
    const double scale = std::max(std::abs(closed), 1e-300);
    check_rel_err_ = std::abs(closed - integral_.value()) / scale;
    if (check_rel_err_ > 1e-9) {
      throw SimulationError("AoI accounting mismatch between integral routes");
    }
    return closed / T;
  }

  /// Relative disagreement between the two area routes, set by finalize().
  double check_rel_err() const { return check_rel_err_; }

 private:
  double last_success_ = 0.0;
  double cursor_ = 0.0;
  KahanSum integral_;
  KahanSum gap_sum_;
  KahanSum gap_sq_sum_;
  std::int64_t n_success_ = 0;
  std::int64_t n_attempts_ = 0;
  double check_rel_err_ = 0.0;
};

}  // namespace aoisim
