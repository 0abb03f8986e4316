#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace aoisim {

/// Kahan-Neumaier compensated summation.
class KahanSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Running raw moments up to order four. Enough for standard errors of the
/// sample mean, the sample second moment, and the sample variance.
class MomentAccumulator {
 public:
  void add(double x) {
    n_ += 1;
    s1_.add(x);
    const double x2 = x * x;
    s2_.add(x2);
    s3_.add(x2 * x);
    s4_.add(x2 * x2);
  }
  void merge(const MomentAccumulator& other) {
    n_ += other.n_;
    s1_.add(other.s1_.value());
    s2_.add(other.s2_.value());
    s3_.add(other.s3_.value());
    s4_.add(other.s4_.value());
  }

  std::int64_t count() const { return n_; }
  double mean() const { return n_ > 0 ? s1_.value() / n_ : 0.0; }
  double raw_moment(int order) const;
  /// Sample variance (n-1 denominator).
  double variance() const;
  double central_moment4() const;

  double stderr_mean() const;
  /// Standard error of the sample second raw moment.
  double stderr_raw_moment2() const;
  /// Asymptotic standard error of the sample variance: sqrt((m4 - var^2)/n).
  double stderr_variance() const;

 private:
  std::int64_t n_ = 0;
  KahanSum s1_, s2_, s3_, s4_;
};

/// Gap statistic for the geometric mean/variance relation var = m(m-1):
/// D = E[x^2] - 2 E[x]^2 + E[x], zero iff the relation holds. The standard
/// error comes from the influence function x^2 - (4m - 1) x.
struct GeometricRelationGap {
  double gap = 0.0;
  double stderr_gap = 0.0;
};
GeometricRelationGap geometric_relation_gap(const MomentAccumulator& acc);

double mean_of(std::span<const double> xs);
double stderr_of(std::span<const double> xs);
/// Linear-interpolated percentile, q in [0, 1]. Copies and sorts.
double percentile_of(std::span<const double> xs, double q);

}  // namespace aoisim
