#include "qtomo/normalfit.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qtomo/error.hpp"

namespace qtomo {

NormalFit make_normal(Point2 mean, Sym2 cov) {
  const double tr = cov.xx + cov.yy;
  const double det = cov.xx * cov.yy - cov.xy * cov.xy;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double big = 0.5 * tr + disc;
  const double small = det / big;  // avoids cancellation in tr/2 - disc
  if (!(big > 0.0) || !(small >= 1e-12 * big))
    throw Error(ErrorCode::SingularCovariance,
                "covariance is singular or nearly so (eigenvalues " + std::to_string(small) +
                    ", " + std::to_string(big) + ")");
  NormalFit f;
  f.mean = mean;
  f.cov = cov;
  f.chol.l11 = std::sqrt(cov.xx);
  f.chol.l21 = cov.xy / f.chol.l11;
  f.chol.l22 = std::sqrt(cov.yy - f.chol.l21 * f.chol.l21);
  return f;
}

NormalFit fit_normal(const Sample2& s) {
  const std::size_t n = s.size();
  if (n < 3)
    throw Error(ErrorCode::SingularCovariance, "need at least 3 points to fit a normal");
  Point2 mean{};
  for (const Point2& p : s.points()) mean = mean + p;
  mean = (1.0 / static_cast<double>(n)) * mean;
  Sym2 cov;
  for (const Point2& p : s.points()) {
    const Point2 d = p - mean;
    cov.xx += d.x * d.x;
    cov.xy += d.x * d.y;
    cov.yy += d.y * d.y;
  }
  const double denom = static_cast<double>(n - 1);
  cov.xx /= denom;
  cov.xy /= denom;
  cov.yy /= denom;
  return make_normal(mean, cov);
}

double contour_radius(IndexingMode mode) {
  const double level = mode.level;
  if (mode.kind == IndexingMode::Kind::EnclosedMass) {
    if (!(level > 0.0 && level < 1.0))
      throw Error(ErrorCode::InvalidP, "enclosed mass must lie in (0, 1)");
    // Radius of a standard bivariate normal is Rayleigh distributed.
    return std::sqrt(-2.0 * std::log1p(-level));
  }
  if (!(level > 0.0 && level <= 0.5))
    throw Error(ErrorCode::InvalidP, "tangent mass must lie in (0, 1/2]");
  return level == 0.5 ? 0.0 : inverse_normal_cdf(1.0 - level);
}

ConvexRegion normal_contour(const NormalFit& f, IndexingMode mode, std::size_t n_vertices) {
  if (n_vertices < 16)
    throw Error(ErrorCode::InvalidConfig, "contours need at least 16 vertices");
  const double r = contour_radius(mode);
  ConvexRegion out;
  if (r == 0.0) {
    out.kind = RegionKind::Point;
    out.vertices = {f.mean};
    return out;
  }
  out.kind = RegionKind::Polygon;
  out.vertices.reserve(n_vertices);
  for (std::size_t k = 0; k < n_vertices; ++k) {
    const double t =
        2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_vertices);
    out.vertices.push_back(f.mean + f.chol.apply({r * std::cos(t), r * std::sin(t)}));
  }
  return out;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidP, "p must lie in (0, 1)");
  if (p == 0.5) return 0.0;
  // Acklam's rational approximation (relative error ~1e-9) followed by one
  // Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double low = 0.02425;
  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Work on whichever tail keeps the residual well conditioned.
  const double e = x < 0.0 ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double normal_halfplane_mass(const NormalFit& f, UnitDirection s, double q) {
  const double mu = dot(s.vec(), f.mean);
  const double var = s.x() * s.x() * f.cov.xx + 2.0 * s.x() * s.y() * f.cov.xy +
                     s.y() * s.y() * f.cov.yy;
  return normal_cdf(-(q - mu) / std::sqrt(var));
}

double mahalanobis(const NormalFit& f, Point2 x) {
  const Point2 d = x - f.mean;
  // Solve L z = d.
  const double z1 = d.x / f.chol.l11;
  const double z2 = (d.y - f.chol.l21 * z1) / f.chol.l22;
  return std::hypot(z1, z2);
}

}  // namespace qtomo
