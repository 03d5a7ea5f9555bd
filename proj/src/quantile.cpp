#include "qtomo/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qtomo/error.hpp"

namespace qtomo {

Sample1::Sample1(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::EmptySample, "sample has no values");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw Error(ErrorCode::NonFiniteValue, "value " + std::to_string(i) + " is not finite");
}

Sample2::Sample2(std::vector<Point2> points) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorCode::EmptySample, "sample has no points");
  for (std::size_t i = 0; i < points_.size(); ++i)
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y))
      throw Error(ErrorCode::NonFiniteValue, "point " + std::to_string(i) + " is not finite");
}

std::vector<double> Sample2::project(UnitDirection s) const {
  std::vector<double> z(points_.size());
  const double sx = s.x(), sy = s.y();
  for (std::size_t i = 0; i < points_.size(); ++i)
    z[i] = sx * points_[i].x + sy * points_[i].y;
  return z;
}

void require_open_probability(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::InvalidP, "p must lie in (0, 1), got " + std::to_string(p));
}

std::size_t type1_rank(double p, std::size_t n) {
  const double pn = p * static_cast<double>(n);
  const double k = std::ceil(pn - 1e-9 * pn);
  if (k < 1.0) return 1;
  if (k > static_cast<double>(n)) return n;
  return static_cast<std::size_t>(k);
}

namespace {

double order_statistic(std::span<double> values, std::size_t rank) {
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

}  // namespace

double quantile_inplace(std::span<double> values, double p, QuantileVersion v) {
  if (values.empty()) throw Error(ErrorCode::EmptySample, "sample has no values");
  require_open_probability(p);
  const std::size_t n = values.size();
  if (v == QuantileVersion::InfType1) return order_statistic(values, type1_rank(p, n));

  const double h = static_cast<double>(n - 1) * p;
  const auto lower = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lower);
  const double lo = order_statistic(values, lower + 1);
  if (frac == 0.0 || lower + 1 >= n) return lo;
  // nth_element leaves everything above the pivot in the tail.
  const double hi = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lower + 1),
                                      values.end());
  return lo + frac * (hi - lo);
}

double quantile(const Sample1& s, double p, QuantileVersion v) {
  std::vector<double> buf(s.values().begin(), s.values().end());
  return quantile_inplace(buf, p, v);
}

QuantileSet quantile_set(const Sample1& s, double p) {
  require_open_probability(p);
  std::vector<double> sorted(s.values().begin(), s.values().end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t k = type1_rank(p, n);
  QuantileSet qs{sorted[k - 1], sorted[k - 1]};
  // p n integral: the check loss is flat between the k-th and (k+1)-th
  // order statistics.
  const double pn = p * static_cast<double>(n);
  if (k < n && std::abs(pn - static_cast<double>(k)) <= 1e-9 * pn) qs.hi = sorted[k];
  return qs;
}

double check_loss(const Sample1& s, double u, double p) {
  require_open_probability(p);
  double total = 0.0;
  for (double x : s.values()) {
    const double r = x - u;
    total += r * (p - (r < 0.0 ? 1.0 : 0.0));
  }
  return total / static_cast<double>(s.size());
}

double directional_quantile(const Sample2& s, UnitDirection dir, double p,
                            QuantileVersion v) {
  std::vector<double> z = s.project(dir);
  return quantile_inplace(z, p, v);
}

}  // namespace qtomo
