#pragma once

#include <cstddef>

#include "qtomo/geom.hpp"
#include "qtomo/quantile.hpp"

namespace qtomo {

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

/// Lower-triangular [[l11, 0], [l21, l22]].
struct Lower2 {
  double l11 = 0.0;
  double l21 = 0.0;
  double l22 = 0.0;

  Point2 apply(Point2 v) const { return {l11 * v.x, l21 * v.x + l22 * v.y}; }
};

struct NormalFit {
  Point2 mean;
  Sym2 cov;
  Lower2 chol;
};

/// Contour index: either the probability inside the ellipse, or the
/// probability of the halfplane tangent to it.
struct IndexingMode {
  enum class Kind { EnclosedMass, TangentMass };
  Kind kind = Kind::TangentMass;
  double level = 0.1;

  static IndexingMode enclosed(double m) { return {Kind::EnclosedMass, m}; }
  static IndexingMode tangent(double p) { return {Kind::TangentMass, p}; }
};

/// Builds a fit from explicit parameters; throws SingularCovariance unless
/// cov is positive definite with condition below 1e12.
NormalFit make_normal(Point2 mean, Sym2 cov);

/// Mean and unbiased (n - 1) covariance. Needs n >= 3 and a non-collinear
/// sample.
NormalFit fit_normal(const Sample2& s);

/// Standardized radius of the contour.
double contour_radius(IndexingMode mode);

/// Polygon with n_vertices on the ellipse mean + L (r cos t, r sin t); a
/// Point at the mean when r = 0.
ConvexRegion normal_contour(const NormalFit& f, IndexingMode mode, std::size_t n_vertices = 256);

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile; absolute error well below 1e-9.
double inverse_normal_cdf(double p);

/// Model probability of the halfplane {x : s'x >= q}.
double normal_halfplane_mass(const NormalFit& f, UnitDirection s, double q);

/// Mahalanobis radius sqrt((x - mean)' cov^-1 (x - mean)).
double mahalanobis(const NormalFit& f, Point2 x);

}  // namespace qtomo
