#include "aoisim/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "aoisim/stats.hpp"

namespace aoisim {
namespace {

void check_p(double p) {
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("p must be in (0, 1]");
}

}  // namespace

double lower_bound_no_feedback(double p) {
  check_p(p);
  return (2.0 - p) / (2.0 * p);
}

double lower_bound_feedback(double p) {
  check_p(p);
  return 1.0 / (2.0 * p);
}

GeometricMoments geometric_moments(double p) {
  check_p(p);
  return GeometricMoments{1.0 / p, (2.0 - p) / (p * p)};
}

RenewalObjective renewal_objective(const SpacingRule& spacings, double p,
                                   double tail_mass_tol) {
  check_p(p);
  spacings.validate();
  const double q = 1.0 - p;
  const std::size_t m = spacings.prefix.size();

  double tail_step = 0.0;
  double tail_ratio = 1.0;
  if (spacings.tail == SpacingRule::Tail::Arithmetic && m >= 2) {
    tail_step = spacings.prefix[m - 1] - spacings.prefix[m - 2];
  }
  if (spacings.tail == SpacingRule::Tail::Geometric && m >= 2) {
    tail_ratio = spacings.prefix[m - 1] / spacings.prefix[m - 2];
    if (q * tail_ratio >= 1.0 || q * tail_ratio * tail_ratio >= 1.0) {
      throw std::invalid_argument("renewal_objective: geometric tail gives divergent sums");
    }
  }

  // Direct summation over k = 1..K with K covering the prefix and enough of
  // the tail to leave less than tail_mass_tol probability mass, then the
  // exact closed form of the remainder under the declared tail rule.
  KahanSum mass, ex, ex2;
  std::size_t k = 0;
  double mass_rem = 1.0;  // q^k after k terms
  const std::size_t hard_cap = m + 2'000'000;
  while ((mass_rem > tail_mass_tol || k < m) && k < hard_cap) {
    ++k;
    const double pk = mass_rem * p;
    const double x = spacings.at(k);
    mass.add(pk);
    ex.add(pk * x);
    ex2.add(pk * x * x);
    mass_rem *= q;
  }

  const double anchor = spacings.at(k);  // x_K
  double tail_ex = 0.0, tail_ex2 = 0.0;
  switch (spacings.tail) {
    case SpacingRule::Tail::Constant:
      tail_ex = mass_rem * anchor;
      tail_ex2 = mass_rem * anchor * anchor;
      break;
    case SpacingRule::Tail::Arithmetic:
      tail_ex = mass_rem * (anchor + tail_step / p);
      tail_ex2 = mass_rem * (anchor * anchor + 2.0 * anchor * tail_step / p +
                             tail_step * tail_step * (2.0 - p) / (p * p));
      break;
    case SpacingRule::Tail::Geometric: {
      const double r = tail_ratio;
      tail_ex = mass_rem * anchor * p * r / (1.0 - q * r);
      tail_ex2 = mass_rem * anchor * anchor * p * r * r / (1.0 - q * r * r);
      break;
    }
  }

  RenewalObjective out;
  out.mean_spacing = ex.value() + tail_ex;
  out.mean_square = ex2.value() + tail_ex2;
  out.mass_summed = mass.value();
  out.terms = static_cast<int>(k);
  if (!(out.mean_spacing > 0.0) || !std::isfinite(out.mean_square)) {
    throw std::invalid_argument("renewal_objective: weighted sums did not converge");
  }
  out.value = out.mean_square / (2.0 * out.mean_spacing);
  out.feasible = out.mean_spacing >= 1.0 / p - 1e-9;
  return out;
}

GridSearchResult renewal_grid_search(double p, const std::vector<SpacingRule>& candidates) {
  check_p(p);
  GridSearchResult result;
  result.values.reserve(candidates.size());
  result.feasible.reserve(candidates.size());
  const double feedback_bound = lower_bound_feedback(p);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const RenewalObjective obj = renewal_objective(candidates[i], p);
    result.values.push_back(obj.value);
    result.feasible.push_back(obj.feasible);
    if (!obj.feasible) continue;
    if (!result.any_feasible || obj.value < result.best_value) {
      result.any_feasible = true;
      result.best_value = obj.value;
      result.best_index = i;
    }
    if (obj.value < feedback_bound - 1e-9) result.none_below_feedback_bound = false;
  }
  return result;
}

double stage1_hitting_bound_unit(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  return 1.0 / std::expm1(alpha);  // == exp(-a) / (1 - exp(-a))
}

double stage1_hitting_bound_retransmit(double alpha, double p) {
  check_p(p);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  const double q = 1.0 - p;
  const double qe = q * std::exp(alpha);
  if (qe >= 1.0) {
    throw std::invalid_argument("alpha outside the domain (1-p) e^alpha < 1");
  }
  const double log_moment =
      std::expm1(-alpha) / p + std::log(p) + alpha - std::log1p(-qe);
  return -std::expm1(-alpha) / log_moment;
}

BoundReport compare_to_bound(const EnsembleSummary& summary, double bound, double p) {
  BoundReport report;
  report.p = p;
  report.bound_no_feedback = lower_bound_no_feedback(p);
  report.bound_feedback = lower_bound_feedback(p);
  report.bound_used = bound;
  report.gap_final = summary.mean - bound;
  report.gap_by_checkpoint.reserve(summary.series.size());
  for (std::size_t k = 0; k < summary.series.size(); ++k) {
    const SeriesStat& s = summary.series[k];
    report.gap_by_checkpoint.push_back(s.mean - bound);
    if (s.mean < bound - 3.0 * s.stderr_mean && !report.significantly_below) {
      report.significantly_below = true;
      report.first_below_checkpoint = static_cast<int>(k);
    }
  }
  return report;
}

}  // namespace aoisim
