#pragma once

#include <cstddef>
#include <vector>

#include "qtomo/geom.hpp"
#include "qtomo/quantile.hpp"

namespace qtomo {

/// Empirical halfspace depth as an exact count.
struct DepthValue {
  std::size_t count = 0;
  std::size_t n = 0;
  double value = 0.0;
};

/// Minimum number of sample points in a closed halfplane whose boundary
/// passes through x, via an angular sweep around x. O(n log n).
DepthValue halfspace_depth(const Sample2& s, Point2 x);

/// Normals of all lines through two distinct sample points, both
/// orientations, plus the four axis directions; sorted by angle, with
/// directions closer than 1e-12 rad merged. O(n^2 log n).
std::vector<UnitDirection> critical_directions(const Sample2& s);

/// {x : depth(x) >= p} computed by brute force: quantile halfplanes at every
/// critical direction, clipped line by line against each other (O(m^2) in
/// the number of directions). Meant for small samples.
ConvexRegion depth_region_oracle(const Sample2& s, double p);

/// Fraction of points in the closed side {x : s'x <= q} opposite to h.
double tangent_mass(const Sample2& s, const Halfplane& h, double tol = 1e-9);
std::size_t tangent_count(const Sample2& s, const Halfplane& h, double tol = 1e-9);

/// Largest number of sample points on one line (collinearity tolerance
/// 1e-9 relative), and the same as a fraction of n.
std::size_t max_hyperplane_count(const Sample2& s);
double max_hyperplane_mass(const Sample2& s);

struct TukeyMedian {
  double p_max = 0.0;
  std::size_t count = 0;  // p_max * n
  ConvexRegion region;
};

/// The nonempty depth level set of maximal level, searched over p = k/n with
/// the critical direction set.
TukeyMedian tukey_median(const Sample2& s);

/// Region of the InfType1 quantile halfplanes at rank k over `dirs`; p = k/n
/// may exceed 1/2 here.
ConvexRegion rank_envelope_region(const Sample2& s, std::size_t k,
                                  const std::vector<UnitDirection>& dirs);

}  // namespace qtomo
