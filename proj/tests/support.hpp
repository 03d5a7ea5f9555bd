// Independent oracles and generators shared by the test binaries. Nothing
// here calls into the library's geometry beyond plain value types.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "qtomo/error.hpp"
#include "qtomo/geom.hpp"
#include "qtomo/quantile.hpp"

namespace qtest {

using qtomo::Point2;

inline std::vector<Point2> gaussian_points(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> z;
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {z(rng), z(rng)};
  return pts;
}

inline std::vector<Point2> uniform_points(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                          double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

/// Integer lattice points, which produce plenty of ties and collinearities.
inline std::vector<Point2> lattice_points(std::size_t n, std::mt19937_64& rng, int span = 4) {
  std::uniform_int_distribution<int> u(0, span);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {double(u(rng)), double(u(rng))};
  return pts;
}

/// Depth by brute force: count closed halfplanes through x at every critical
/// angle and between consecutive critical angles. O(n^2).
inline std::size_t brute_depth_count(const std::vector<Point2>& pts, Point2 x) {
  std::vector<double> angles;
  for (const Point2& p : pts) {
    const double dx = p.x - x.x, dy = p.y - x.y;
    if (dx == 0.0 && dy == 0.0) continue;
    const double a = std::atan2(dy, dx);
    angles.push_back(a + std::numbers::pi / 2);
    angles.push_back(a - std::numbers::pi / 2);
  }
  if (angles.empty()) return pts.size();
  for (double& a : angles) a = std::remainder(a, 2 * std::numbers::pi);
  std::sort(angles.begin(), angles.end());
  std::vector<double> cand = angles;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double a = angles[i];
    const double b = i + 1 < angles.size() ? angles[i + 1] : angles[0] + 2 * std::numbers::pi;
    cand.push_back(0.5 * (a + b));
  }
  std::size_t best = pts.size();
  for (double a : cand) {
    const double ux = std::cos(a), uy = std::sin(a);
    std::size_t c = 0;
    for (const Point2& p : pts) {
      const double dx = p.x - x.x, dy = p.y - x.y;
      // Relative slack so points on the boundary at a critical angle count.
      const double along = ux * dx + uy * dy;
      const double scale = std::hypot(dx, dy);
      if (along >= -1e-12 * scale) ++c;
    }
    best = std::min(best, c);
  }
  return best;
}

inline double seg_distance(Point2 p, Point2 a, Point2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Distance from p to a filled convex CCW vertex list (1 or 2 vertices allowed).
inline double poly_distance(Point2 p, const std::vector<Point2>& v) {
  if (v.size() == 1) return std::hypot(p.x - v[0].x, p.y - v[0].y);
  if (v.size() == 2) return seg_distance(p, v[0], v[1]);
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < 0) inside = false;
    best = std::min(best, seg_distance(p, a, b));
  }
  return inside ? 0.0 : best;
}

/// Points spread along the boundary of a vertex list.
inline std::vector<Point2> dense_boundary(const std::vector<Point2>& v, int per_edge = 200) {
  if (v.size() <= 1) return v;
  std::vector<Point2> out;
  const std::size_t m = v.size() == 2 ? 1 : v.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    for (int k = 0; k <= per_edge; ++k) {
      const double t = double(k) / per_edge;
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
  }
  return out;
}

/// Hausdorff distance estimated from dense boundary samples (a lower bound
/// converging to the exact value from below as per_edge grows).
inline double dense_hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b,
                              int per_edge = 200) {
  double h = 0.0;
  for (const Point2& p : dense_boundary(a, per_edge)) h = std::max(h, poly_distance(p, b));
  for (const Point2& p : dense_boundary(b, per_edge)) h = std::max(h, poly_distance(p, a));
  return h;
}

/// Sorted-copy order statistic oracle (1-based rank).
inline double order_stat(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end());
  return v[k - 1];
}

inline std::vector<Point2> regular_polygon(std::size_t m, double r = 1.0, double phase = 0.0) {
  std::vector<Point2> v(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double a = phase + 2 * std::numbers::pi * double(k) / double(m);
    v[k] = {r * std::cos(a), r * std::sin(a)};
  }
  return v;
}

/// True iff f throws a qtomo::Error carrying `code`.
template <class F>
bool throws_code(F&& f, qtomo::ErrorCode code) {
  try {
    f();
  } catch (const qtomo::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace qtest
