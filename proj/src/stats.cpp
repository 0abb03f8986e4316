#include "aoisim/stats.hpp"

#include <algorithm>
#include <stdexcept>

namespace aoisim {

double MomentAccumulator::raw_moment(int order) const {
  if (n_ == 0) return 0.0;
  switch (order) {
    case 1: return s1_.value() / n_;
    case 2: return s2_.value() / n_;
    case 3: return s3_.value() / n_;
    case 4: return s4_.value() / n_;
    default: throw std::invalid_argument("raw_moment: order must be 1..4");
  }
}

double MomentAccumulator::variance() const {
  if (n_ < 2) return 0.0;
  const double m = mean();
  const double ss = s2_.value() - n_ * m * m;
  return std::max(0.0, ss / (n_ - 1));
}

double MomentAccumulator::central_moment4() const {
  if (n_ == 0) return 0.0;
  const double m = mean();
  const double m2 = raw_moment(2), m3 = raw_moment(3), m4 = raw_moment(4);
  return m4 - 4.0 * m * m3 + 6.0 * m * m * m2 - 3.0 * m * m * m * m;
}

double MomentAccumulator::stderr_mean() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / n_);
}

double MomentAccumulator::stderr_raw_moment2() const {
  if (n_ < 2) return 0.0;
  // sd of x^2 over sqrt(n)
  const double m2 = raw_moment(2);
  const double var_x2 = std::max(0.0, raw_moment(4) - m2 * m2);
  return std::sqrt(var_x2 / n_);
}

double MomentAccumulator::stderr_variance() const {
  if (n_ < 2) return 0.0;
  const double v = variance();
  return std::sqrt(std::max(0.0, central_moment4() - v * v) / n_);
}

GeometricRelationGap geometric_relation_gap(const MomentAccumulator& acc) {
  GeometricRelationGap out;
  const double n = static_cast<double>(acc.count());
  if (n < 2) return out;
  const double m1 = acc.raw_moment(1);
  const double m2 = acc.raw_moment(2);
  out.gap = m2 - 2.0 * m1 * m1 + m1;
  // Influence function of the gap: y = x^2 - (4 m1 - 1) x.
  const double c = 4.0 * m1 - 1.0;
  const double var_x = std::max(0.0, m2 - m1 * m1);
  const double var_x2 = std::max(0.0, acc.raw_moment(4) - m2 * m2);
  const double cov_x_x2 = acc.raw_moment(3) - m1 * m2;
  const double var_y = std::max(0.0, var_x2 + c * c * var_x - 2.0 * c * cov_x_x2);
  out.stderr_gap = std::sqrt(var_y / n);
  return out;
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double stderr_of(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  KahanSum ss;
  for (double x : xs) ss.add((x - m) * (x - m));
  return std::sqrt(ss.value() / static_cast<double>(n - 1) / static_cast<double>(n));
}

double percentile_of(std::span<const double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  q = std::clamp(q, 0.0, 1.0);
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace aoisim
