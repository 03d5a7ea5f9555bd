#include "qtomo/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtomo/depth.hpp"
#include "qtomo/error.hpp"

namespace qtomo {

DirectionSet DirectionSet::from(std::vector<UnitDirection> dirs) {
  std::stable_sort(dirs.begin(), dirs.end(), [](const UnitDirection& a, const UnitDirection& b) {
    return a.angle() < b.angle();
  });
  dirs.erase(std::unique(dirs.begin(), dirs.end(),
                         [](const UnitDirection& a, const UnitDirection& b) {
                           return a.x() == b.x() && a.y() == b.y();
                         }),
             dirs.end());
  return {std::move(dirs), true};
}

DirectionSet DirectionSet::critical(const Sample2& s) { return {critical_directions(s), true}; }

double DirectionSet::max_gap() const {
  if (dirs.size() < 2) return 2.0 * std::numbers::pi;
  std::vector<double> angles;
  angles.reserve(dirs.size());
  for (const auto& d : dirs) angles.push_back(d.angle());
  if (!sorted_by_angle) std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap;
}

void DirectionSet::validate() const {
  if (dirs.empty()) throw Error(ErrorCode::TooFewDirections, "direction set is empty");
  if (max_gap() >= std::numbers::pi)
    throw Error(ErrorCode::UnboundedRegion,
                "directions lie in a closed half circle; the envelope would be unbounded");
}

DirectionSet uniform_directions(std::size_t n) {
  if (n < 3)
    throw Error(ErrorCode::TooFewDirections,
                "need at least 3 directions, got " + std::to_string(n));
  DirectionSet set;
  set.dirs.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    set.dirs.push_back(UnitDirection::from_angle(2.0 * std::numbers::pi *
                                                 static_cast<double>(k) /
                                                 static_cast<double>(n)));
  set.sorted_by_angle = true;
  return set;
}

void require_envelope_level(double p) {
  if (!(p > 0.0 && p <= 0.5))
    throw Error(ErrorCode::InvalidP, "envelope level must lie in (0, 1/2], got " + std::to_string(p));
}

Envelope envelope_from_offsets(double p, const DirectionSet& dirs, std::span<const double> q) {
  if (q.size() != dirs.size())
    throw Error(ErrorCode::InvalidConfig, "one offset per direction expected");
  Envelope e;
  e.p = p;
  e.halfplanes.reserve(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) e.halfplanes.push_back({dirs.dirs[i], q[i]});
  e.region = intersect_halfplanes(e.halfplanes);
  e.active = e.region.active;
  return e;
}

std::vector<Envelope> build_envelopes(const Sample2& s, std::span<const double> ps,
                                      const DirectionSet& dirs,
                                      const DirectionalQuantileEstimator& est) {
  for (double p : ps) require_envelope_level(p);
  dirs.validate();
  const auto grid = est.evaluate_grid(s, dirs.dirs, ps);
  std::vector<Envelope> out;
  out.reserve(ps.size());
  for (std::size_t l = 0; l < ps.size(); ++l)
    out.push_back(envelope_from_offsets(ps[l], dirs, grid[l]));
  return out;
}

Envelope build_envelope(const Sample2& s, double p, const DirectionSet& dirs,
                        const DirectionalQuantileEstimator& est) {
  const double ps[] = {p};
  return std::move(build_envelopes(s, ps, dirs, est).front());
}

std::size_t count_enclosed(const ConvexRegion& r, const Sample2& s) {
  if (r.empty()) return 0;
  double scale = 1.0;
  for (const Point2& v : r.vertices) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
  const double tol = IntersectionTolerance{}.collapse * scale;
  std::size_t count = 0;
  for (const Point2& pt : s.points())
    if (region_contains(r, pt, tol)) ++count;
  return count;
}

CoverageResult coverage_search(const Sample2& s, double target_mass, const DirectionSet& dirs,
                               const DirectionalQuantileEstimator& est) {
  if (!(target_mass > 0.0 && target_mass <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "coverage must lie in (0, 1]");
  const std::size_t n = s.size();
  const std::size_t kmax = std::max<std::size_t>(1, n / 2);
  const double need = target_mass * static_cast<double>(n);

  auto attempt = [&](std::size_t k) {
    CoverageResult r;
    r.k = k;
    r.p = static_cast<double>(k) / static_cast<double>(n);
    if (r.p > 0.5) r.p = 0.5;
    r.envelope = build_envelope(s, r.p, dirs, est);
    r.coverage = static_cast<double>(count_enclosed(r.envelope.region, s)) /
                 static_cast<double>(n);
    return r;
  };
  auto enough = [&](const CoverageResult& r) {
    return r.coverage * static_cast<double>(n) >= need - 1e-9;
  };

  CoverageResult best = attempt(1);
  if (!enough(best))
    throw Error(ErrorCode::NoEnvelope, "even p = 1/n encloses only " +
                                           std::to_string(best.coverage) + " of the sample");
  // Coverage shrinks as p grows (nested envelopes).
  std::size_t lo = 1, hi = kmax;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    CoverageResult r = attempt(mid);
    if (enough(r)) {
      lo = mid;
      best = std::move(r);
    } else {
      hi = mid - 1;
    }
  }
  return best;
}

std::vector<Point2> biplot_curve(const Sample2& s, double p, Point2 origin,
                                 const DirectionSet& dirs,
                                 const DirectionalQuantileEstimator& est) {
  require_envelope_level(p);
  if (!dirs.sorted_by_angle)
    throw Error(ErrorCode::InvalidConfig, "biplot directions must be sorted by angle");
  std::vector<Point2> shifted;
  shifted.reserve(s.size());
  for (const Point2& pt : s.points()) shifted.push_back(pt - origin);
  const Sample2 centered(std::move(shifted));
  const double ps[] = {p};
  const auto q = est.evaluate_grid(centered, dirs.dirs, ps).front();
  std::vector<Point2> curve;
  curve.reserve(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    curve.push_back(origin + q[i] * dirs.dirs[i].vec());
  return curve;
}

Point2 coordinatewise_median(const Sample2& s) {
  std::vector<double> xs, ys;
  xs.reserve(s.size());
  ys.reserve(s.size());
  for (const Point2& pt : s.points()) {
    xs.push_back(pt.x);
    ys.push_back(pt.y);
  }
  return {quantile_inplace(xs, 0.5, QuantileVersion::InterpolatedR7),
          quantile_inplace(ys, 0.5, QuantileVersion::InterpolatedR7)};
}

}  // namespace qtomo
