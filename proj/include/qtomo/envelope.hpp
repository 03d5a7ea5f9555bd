#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qtomo/estimators.hpp"
#include "qtomo/geom.hpp"
#include "qtomo/quantile.hpp"

namespace qtomo {

struct DirectionSet {
  std::vector<UnitDirection> dirs;
  bool sorted_by_angle = false;

  /// Sorts by angle and drops exact duplicates.
  static DirectionSet from(std::vector<UnitDirection> dirs);
  /// Exact pair-normal set of the sample; O(n^2) directions.
  static DirectionSet critical(const Sample2& s);

  std::size_t size() const { return dirs.size(); }
  /// Largest angular gap between circularly consecutive directions.
  double max_gap() const;
  /// Throws UnboundedRegion when max_gap() >= pi.
  void validate() const;
};

/// Angles 2 pi k / n, k = 0..n-1.
DirectionSet uniform_directions(std::size_t n);

/// Intersection of the halfplanes {x : s'x >= q(s)} over a direction set.
struct Envelope {
  double p = 0.0;
  ConvexRegion region;
  std::vector<Halfplane> halfplanes;
  /// Same as region.active: indices into halfplanes.
  std::vector<std::size_t> active;
};

/// Throws InvalidP unless 0 < p <= 1/2.
void require_envelope_level(double p);

/// Envelope from precomputed offsets q[i] for dirs[i].
Envelope envelope_from_offsets(double p, const DirectionSet& dirs, std::span<const double> q);

Envelope build_envelope(const Sample2& s, double p, const DirectionSet& dirs,
                        const DirectionalQuantileEstimator& est);

/// One envelope per level, sharing a single estimator sweep.
std::vector<Envelope> build_envelopes(const Sample2& s, std::span<const double> ps,
                                      const DirectionSet& dirs,
                                      const DirectionalQuantileEstimator& est);

/// Sample points inside the closed region (boundary tolerance scaled like
/// the intersection kernel's collapse width).
std::size_t count_enclosed(const ConvexRegion& r, const Sample2& s);

struct CoverageResult {
  double p = 0.0;
  std::size_t k = 0;
  double coverage = 0.0;
  Envelope envelope;
};

/// Largest p = k/n <= 1/2 whose envelope encloses at least target_mass of the
/// sample. Throws NoEnvelope if even p = 1/n falls short.
CoverageResult coverage_search(const Sample2& s, double target_mass, const DirectionSet& dirs,
                               const DirectionalQuantileEstimator& est);

/// origin + Q(p, s; X - origin) s for every direction, in angular order.
std::vector<Point2> biplot_curve(const Sample2& s, double p, Point2 origin,
                                 const DirectionSet& dirs,
                                 const DirectionalQuantileEstimator& est);

/// Coordinate-wise median (InterpolatedR7 at 1/2).
Point2 coordinatewise_median(const Sample2& s);

}  // namespace qtomo
