#pragma once

#include <cstddef>
#include <vector>

#include "aoisim/engine.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

/// Optimal long-run average age without feedback: (2 - p) / (2p).
double lower_bound_no_feedback(double p);

/// Optimal long-run average age with perfect feedback: 1 / (2p).
double lower_bound_feedback(double p);

struct GeometricMoments {
  double mean = 0.0;           // 1/p
  double second_moment = 0.0;  // (2-p)/p^2
};
GeometricMoments geometric_moments(double p);

/// Renewal objective E[X^2] / (2 E[X]) for inter-success delays X = x_K with
/// K geometric(p). Evaluated by direct summation with the declared tail rule
/// closed out analytically past the truncation point, so values are exact up
/// to floating point.
struct RenewalObjective {
  double value = 0.0;
  bool feasible = false;      // E[X] >= 1/p (update rate within energy budget)
  double mean_spacing = 0.0;  // E[X]
  double mean_square = 0.0;   // E[X^2]
  double mass_summed = 0.0;   // probability mass covered by the direct sum
  int terms = 0;              //directly summed terms before the analytic tail
};
RenewalObjective renewal_objective(const SpacingRule& spacings, double p,
                                   double tail_mass_tol = 1e-15);

struct GridSearchResult {
  std::size_t best_index = 0;          // among feasible candidates
  double best_value = 0.0;
  bool any_feasible = false;
  bool none_below_feedback_bound = true;  // no candidate beats 1/(2p) - 1e-9
  std::vector<double> values;
  std::vector<bool> feasible;
};
GridSearchResult renewal_grid_search(double p, const std::vector<SpacingRule>& candidates);

/// Lower bound on the expected stage-one length (unit-spaced schedule) from
/// the exponential-martingale argument: exp(-a)/(1 - exp(-a)) = 1/expm1(a).
/// Diverges as a -> 0+.
double stage1_hitting_bound_unit(double alpha);

/// Retransmission-schedule counterpart: (1 - exp(-a)) / g(a) with
/// g(a) = (1/p)(exp(-a) - 1) + log(p e^a / (1 - (1-p) e^a)),
/// valid while (1-p) e^a < 1. Diverges as a -> 0+.
double stage1_hitting_bound_retransmit(double alpha, double p);

struct BoundReport {
  double p = 0.0;
  double bound_no_feedback = 0.0;  // per unit arrival rate
  double bound_feedback = 0.0;
  double bound_used = 0.0;         // the bound compared against (rate-adjusted)
  double gap_final = 0.0;          // ensemble mean minus bound at the horizon
  std::vector<double> gap_by_checkpoint;
  bool significantly_below = false;  // mean < bound - 3*stderr somewhere
  int first_below_checkpoint = -1;
};

/// Compare an ensemble's convergence series against a theorem bound
/// (already adjusted for the arrival rate).
BoundReport compare_to_bound(const EnsembleSummary& summary, double bound, double p);

}  // namespace aoisim
