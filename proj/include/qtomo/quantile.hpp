#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qtomo/geom.hpp"

namespace qtomo {

/// A univariate sample. Nonempty, finite values only.
class Sample1 {
 public:
  explicit Sample1(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
};

/// A bivariate sample in input order. Nonempty, finite coordinates only.
class Sample2 {
 public:
  explicit Sample2(std::vector<Point2> points);

  std::span<const Point2> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const Point2& operator[](std::size_t i) const { return points_[i]; }

  /// Projections s'x_i in input order.
  std::vector<double> project(UnitDirection s) const;

 private:
  std::vector<Point2> points_;
};

enum class QuantileVersion {
  /// inf{u : F(u) >= p}: the ceil(p n)-th order statistic.
  InfType1,
  /// Linear interpolation at rank 1 + (n - 1) p (the R default, type 7).
  InterpolatedR7,
};

/// Closed interval of check-loss minimizers.
struct QuantileSet {
  double lo = 0.0;
  double hi = 0.0;
};

/// ceil(p n) with a small relative guard against p*n landing one ulp above an
/// integer; clamped to [1, n].
std::size_t type1_rank(double p, std::size_t n);

/// Throws InvalidP unless 0 < p < 1.
void require_open_probability(double p);

double quantile(const Sample1& s, double p, QuantileVersion v);

/// Quantile of an unsorted buffer; reorders `values` in place.
double quantile_inplace(std::span<double> values, double p, QuantileVersion v);

QuantileSet quantile_set(const Sample1& s, double p);

/// (1/n) sum (x_i - u)(p - 1[x_i < u]).
double check_loss(const Sample1& s, double u, double p);

double directional_quantile(const Sample2& s, UnitDirection dir, double p,
                            QuantileVersion v);

}  // namespace qtomo
