#include "qtomo/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "qtomo/error.hpp"

namespace qtomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Line {
  Point2 s;
  double q;
  double angle;
  std::size_t index;  // into the caller's halfplane list
};

Point2 line_intersection(const Line& a, const Line& b) {
  const double det = cross(a.s, b.s);
  return {(a.q * b.s.y - b.q * a.s.y) / det, (a.s.x * b.q - b.s.x * a.q) / det};
}

// Strictly outside by more than eps. Many lines share a vertex in exact
// envelopes; without the slack, rounding lets them evict each other.
bool violates(const Line& l, Point2 p, double eps) { return dot(l.s, p) < l.q - eps; }

// Outcome of one deque sweep: the surviving lines in boundary order, or an
// empty-region certificate (the lines that were in play when it failed).
struct SweepResult {
  bool empty = false;
  std::vector<std::size_t> lines;  // positions into the sorted line list
};

SweepResult deque_sweep(const std::vector<Line>& lines, double eps) {
  const std::size_t m = lines.size();
  std::vector<std::size_t> dq(m);
  std::size_t head = 0;
  std::size_t tail = 0;  // one past last
  auto size = [&] { return tail - head; };

  auto fail = [&](std::size_t extra) {
    SweepResult r;
    r.empty = true;
    r.lines.assign(dq.begin() + static_cast<std::ptrdiff_t>(head),
                   dq.begin() + static_cast<std::ptrdiff_t>(tail));
    if (extra < m) r.lines.push_back(extra);
    return r;
  };

  for (std::size_t i = 0; i < m; ++i) {
    const Line& cur = lines[i];
    while (size() >= 2 &&
           violates(cur,
line_intersection(lines[dq[tail - 2]], lines[dq[tail - 1]]), eps))
      --tail;
    while (size() >= 2 &&
           violates(cur,
line_intersection(lines[dq[head]], lines[dq[head + 1]]), eps))
      ++head;
    if (size() >= 1 && cross(lines[dq[tail - 1]].s, cur.s) <= 0.0) return fail(i);
    dq[tail++] = i;
  }
  while (size() >= 3 &&
         violates(lines[dq[head]],
line_intersection(lines[dq[tail - 2]], lines[dq[tail - 1]]), eps))
    --tail;
  while (size() >= 3 &&
         violates(lines[dq[tail - 1]],
line_intersection(lines[dq[head]], lines[dq[head + 1]]), eps))
    ++head;
  if (size() < 3) return fail(m);
  for (std::size_t k = head; k < tail; ++k) {
    const std::size_t next = (k + 1 < tail) ? k + 1 : head;
    if (cross(lines[dq[k]].s, lines[dq[next]].s) <= 0.0) return fail(m);
  }

  SweepResult r;
  r.lines.assign(dq.begin() + static_cast<std::ptrdiff_t>(head),
                 dq.begin() + static_cast<std::ptrdiff_t>(tail));
  return r;
}

// vertices[k] is where boundary line k-1 meets line k.
std::vector<Point2> boundary_vertices(const std::vector<Line>& lines,
                                      const std::vector<std::size_t>& order) {
  const std::size_t m = order.size();
  std::vector<Point2> v(m);
  for (std::size_t k = 0; k < m; ++k)
    v[k] = line_intersection(lines[order[(k + m - 1) % m]], lines[order[k]]);
  return v;
}

// Drops boundary lines whose edge has collapsed to a vertex (they only touch
// the region) until every edge is longer than dup_tol. Length is measured
// along the line's own direction, so an edge that rounding turned backwards
// (a redundant line kept by the sweep) is dropped too.
void drop_touching_lines(const std::vector<Line>& lines, std::vector<std::size_t>& order,
                         std::vector<Point2>& verts, double dup_tol) {
  for (;;) {
    const std::size_t m = order.size();
    if (m < 3) return;
    std::vector<std::size_t> kept;
    kept.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      const Point2 d = verts[(k + 1) % m] - verts[k];
      const Point2 s = lines[order[k]].s;
      if (cross(d, s) > dup_tol) kept.push_back(order[k]);
    }
    if (kept.size() == m) return;
    order = std::move(kept);
    if (order.size() < 3) return;
    verts = boundary_vertices(lines, order);
  }
}

double width_ccw(std::span<const Point2> v) {
  const std::size_t m = v.size();
  if (m < 3) return 0.0;
  double longest = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    longest = std::max(longest, norm(v[(i + 1) % m] - v[i]));
    scale = std::max({scale, std::abs(v[i].x), std::abs(v[i].y)});
  }
  // Clusters of nearly coincident vertices give rounding-level dips in the
  // height sequence and edges with meaningless directions; step over both.
  const double dip = 1e-12 * scale;
  const double short_edge = 1e-6 * longest;
  double best = std::numeric_limits<double>::infinity();
  std::size_t j = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 a = v[i];
    const Point2 e = v[(i + 1) % m] - a;
    const double len = norm(e);
    if (len == 0.0 || len < short_edge) continue;
    auto height = [&](std::size_t k) { return cross(e, v[k % m] - a) / len; };
    if (j < i + 1) j = i + 1;
    std::size_t steps = 0;
    double top = height(j);
    std::size_t at = j;
    while (steps < m && height(j + 1) >= top - dip) {
      ++j;
      ++steps;
      if (height(j) > top) top = height(j), at = j;
    }
    j = at;
    best = std::min(best, top);
  }
  return std::isfinite(best) ? best : 0.0;
}

// Vertices closer than this (relative to the coordinate scale) are merged.
// Many lines through one data point meet at nearly equal angles, and their
// pairwise intersections scatter by about eps / angle.
constexpr double kMergeRelative = 1e-10;

double coordinate_scale(std::span<const Point2> v) {
  double scale = 1.0;
  for (const Point2& p : v) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  return scale;
}

// Drops vertices within the merge tolerance of their predecessor on a CCW
// cycle. When `order` is given (edge k of the cycle lies on line order[k]),
// the edge that collapsed goes with its end vertex.
void merge_close_vertices(std::vector<Point2>& v, std::vector<std::size_t>* order = nullptr) {
  const double tol = kMergeRelative * coordinate_scale(v);
  std::vector<Point2> out;
  std::vector<std::size_t> lines;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!out.empty() && norm(v[k] - out.back()) <= tol) {
      if (order) lines.back() = (*order)[k];
      continue;
    }
    out.push_back(v[k]);
    if (order) lines.push_back((*order)[k]);
  }
  while (out.size() > 1 && norm(out.back() - out.front()) <= tol) {
    out.pop_back();
    if (order) lines.pop_back();
  }
  v = std::move(out);
  if (order) *order = std::move(lines);
}

// Reduces a convex CCW vertex list of negligible width to a point or a
// segment along its long axis.
ConvexRegion collapse_thin(std::span<const Point2> v, double collapse_width) {
  ConvexRegion r;
  Point2 axis{1.0, 0.0};
  double longest = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point2 e = v[(k + 1) % v.size()] - v[k];
    const double len = norm(e);
    if (len > longest) {
      longest = len;
      axis = (1.0 / len) * e;
    }
  }
  const Point2 across{-axis.y, axis.x};
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double wlo = lo, whi = -lo;
  for (const Point2& p : v) {
    lo = std::min(lo, dot(axis, p));
    hi = std::max(hi, dot(axis, p));
    wlo = std::min(wlo, dot(across, p));
    whi = std::max(whi, dot(across, p));
  }
  const double mid = 0.5 * (wlo + whi);
  if (hi - lo <= collapse_width) {
    r.kind = RegionKind::Point;
    r.vertices = {0.5 * (lo + hi) * axis + mid * across};
  } else {
    r.kind = RegionKind::Segment;
    r.vertices = {lo * axis + mid * across, hi * axis + mid * across};
  }
  return r;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Point2 a, Point2 b, Point2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

// Closed point-in-convex-polygon test. Edges shorter than 1e-9 of the
// coordinate scale have rounding-dominated directions and are skipped; the
// region they cut off is no wider than the edge itself.
bool polygon_inside(std::span<const Point2> v, Point2 p) {
  const double short_edge = 1e-9 * coordinate_scale(v);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 e = v[(i + 1) % v.size()] - v[i];
    if (norm(e) < short_edge) continue;
    if (cross(e, p - v[i]) < 0.0) return false;
  }
  return true;
}

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
  const int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

double norm(Point2 a) { return std::hypot(a.x, a.y); }

UnitDirection::UnitDirection(double x, double y) {
  const double n = std::hypot(x, y);
  if (!(n > 0.0) || !std::isfinite(n))
    throw Error(ErrorCode::InvalidConfig, "direction must be a finite nonzero vector");
  x_ = x / n;
  y_ = y / n;
}

UnitDirection UnitDirection::from_angle(double theta) {
  UnitDirection u;
  u.x_ = std::cos(theta);
  u.y_ = std::sin(theta);
  return u;
}

double UnitDirection::angle() const {
  double a = std::atan2(y_, x_);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

UnitDirection UnitDirection::operator-() const {
  UnitDirection u;
  u.x_ = -x_;
  u.y_ = -y_;
  return u;
}

ConvexRegion intersect_halfplanes(std::span<const Halfplane> hs,
                                  const IntersectionTolerance& tol) {
  if (hs.empty())
    throw Error(ErrorCode::UnboundedRegion, "no halfplanes to intersect");

  std::vector<Line> all(hs.size());
  bool sorted = true;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    all[i] = {hs[i].s.vec(), hs[i].q, hs[i].s.angle(), i};
    if (i > 0 && all[i].angle < all[i - 1].angle) sorted = false;
  }
  if (!sorted)
    std::stable_sort(all.begin(), all.end(),
                     [](const Line& a, const Line& b) { return a.angle < b.angle; });

  // Parallel normals: keep the tightest offset (first one on ties).
  std::vector<Line> lines;
  lines.reserve(all.size());
  for (const Line& l : all) {
    if (!lines.empty() && l.angle - lines.back().angle < tol.parallel_angle) {
      if (l.q > lines.back().q) {
        const double anchor = lines.back().angle;
        lines.back() = l;
        lines.back().angle = anchor;
      }
      continue;
    }
    lines.push_back(l);
  }
  if (lines.size() > 1 &&
      lines.front().angle + kTwoPi - lines.back().angle < tol.parallel_angle) {
    if (lines.back().q > lines.front().q) {
      lines.front() = lines.back();
      lines.front().angle -= kTwoPi;
    }
    lines.pop_back();
  }

  double max_gap = lines.size() == 1 ? kTwoPi
                                     : lines.front().angle + kTwoPi - lines.back().angle;
  for (std::size_t k = 1; k < lines.size(); ++k)
    max_gap = std::max(max_gap, lines[k].angle - lines[k - 1].angle);
  if (max_gap >= std::numbers::pi - 1e-12)
    throw Error(ErrorCode::UnboundedRegion,
                "halfplane normals lie in a closed half circle; intersection is unbounded");

  double scale = 1.0;
  for (const Line& l : lines) scale = std::max(scale, std::abs(l.q));
  const double dup_tol = tol.relax * scale;
  const double collapse_width = tol.collapse * scale;

  auto original_indices = [&](const std::vector<Line>& src,
                              const std::vector<std::size_t>& order) {
    std::vector<std::size_t> out;
    out.reserve(order.size());
    for (std::size_t k : order) out.push_back(src[k].index);
    return out;
  };

  SweepResult exact = deque_sweep(lines, dup_tol);
  if (!exact.empty) {
    std::vector<Point2> verts = boundary_vertices(lines, exact.lines);
    drop_touching_lines(lines, exact.lines, verts, dup_tol);
    merge_close_vertices(verts, &exact.lines);
    if (exact.lines.size() >= 3 && width_ccw(verts) > collapse_width) {
      ConvexRegion r;
      r.kind = RegionKind::Polygon;
      r.vertices = std::move(verts);
      r.active = original_indices(lines, exact.lines);
      return r;
    }
  }

  // Empty or collapsed: decide with every offset relaxed by a hair, which
  // turns exact points and segments into thin polygons.
  std::vector<Line> relaxed = lines;
  for (Line& l : relaxed) l.q -= dup_tol;
  SweepResult loose = deque_sweep(relaxed, dup_tol);
  ConvexRegion r;
  if (loose.empty) {
    r.kind = RegionKind::Empty;
    r.active = original_indices(relaxed, loose.lines);
    std::sort(r.active.begin(), r.active.end());
    return r;
  }
  std::vector<Point2> verts = boundary_vertices(relaxed, loose.lines);
  if (width_ccw(verts) > collapse_width) {
    // Only reachable when the exact sweep lost a nondegenerate region to
    // rounding; report the relaxed polygon.
    drop_touching_lines(relaxed, loose.lines, verts, dup_tol);
    merge_close_vertices(verts, &loose.lines);
    r.kind = RegionKind::Polygon;
    r.vertices = std::move(verts);
    r.active = original_indices(relaxed, loose.lines);
    return r;
  }
  r = collapse_thin(verts, collapse_width);
  r.active = original_indices(relaxed, loose.lines);
  return r;
}

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point2& p : pts) {
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    const Point2& p = pts[i];
    while (k >= lower && cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0) --k;
    hull[k++] = p;
  }
  hull.resize(k - 1);
  return hull;
}

ConvexRegion region_from_points(std::vector<Point2> pts, double collapse_width) {
  ConvexRegion r;
  if (pts.empty()) return r;
  std::vector<Point2> hull = convex_hull(std::move(pts));
  merge_close_vertices(hull);
  if (hull.size() >= 3 && width_ccw(hull) > collapse_width) {
    r.kind = RegionKind::Polygon;
    r.vertices = std::move(hull);
    return r;
  }
  return collapse_thin(hull, collapse_width);
}

double polygon_area(std::span<const Point2> ccw) {
  double twice = 0.0;
  for (std::size_t i = 0; i < ccw.size(); ++i)
    twice += cross(ccw[i], ccw[(i + 1) % ccw.size()]);
  return 0.5 * twice;
}

Point2 vertex_centroid(const ConvexRegion& r) {
  if (r.vertices.empty())
    throw Error(ErrorCode::EmptyRegion, "centroid of an empty region");
  Point2 c{};
  for (const Point2& v : r.vertices) c = c + v;
  return (1.0 / static_cast<double>(r.vertices.size())) * c;
}

double region_diameter(const ConvexRegion& r) {
  double d = 0.0;
  for (std::size_t i = 0; i < r.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < r.vertices.size(); ++j)
      d = std::max(d, norm(r.vertices[i] - r.vertices[j]));
  return d;
}

double distance_to_region(Point2 p, const ConvexRegion& r) {
  const auto& v = r.vertices;
  switch (r.kind) {
    case RegionKind::Empty:
      throw Error(ErrorCode::EmptyRegion, "distance to an empty region");
    case RegionKind::Point:
      return norm(p - v[0]);
    case RegionKind::Segment:
      return point_segment_distance(p, v[0], v[1]);
    case RegionKind::Polygon:
      break;
  }
  if (polygon_inside(v, p)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

double signed_boundary_distance(const ConvexRegion& r, Point2 p) {
  if (r.kind != RegionKind::Polygon) return distance_to_region(p, r);
  const auto& v = r.vertices;
  double boundary = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    boundary = std::min(boundary, point_segment_distance(p, v[i], v[(i + 1) % v.size()]));
  return polygon_inside(v, p) ? -boundary : boundary;
}

bool region_contains(const ConvexRegion& r, Point2 p, double tol) {
  if (r.empty()) return false;
  return distance_to_region(p, r) <= tol;
}

double hausdorff_distance(const ConvexRegion& a, const ConvexRegion& b) {
  if (a.empty() || b.empty())
    throw Error(ErrorCode::EmptyRegion, "Hausdorff distance needs nonempty regions");
  // The distance to a convex set is convex, so each directed part peaks at a
  // vertex.
  auto directed = [](const ConvexRegion& from, const ConvexRegion& to) {
    double d = 0.0;
    for (const Point2& v : from.vertices) d = std::max(d, distance_to_region(v, to));
    return d;
  };
  return std::max(directed(a, b), directed(b, a));
}

double kappa(const ConvexRegion& r) {
  if (r.kind != RegionKind::Polygon)
    throw Error(ErrorCode::DegenerateRegion, "kappa is infinite for regions with empty interior");
  const auto& v = r.vertices;
  const std::size_t m = v.size();
  double worst = 1.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Point2 in = v[i] - v[(i + m - 1) % m];
    const Point2 out = v[(i + 1) % m] - v[i];
    const double c = dot(in, out) / (norm(in) * norm(out));
    if (c <= -1.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::sqrt(2.0 / (1.0 + c)));
  }
  return worst;
}

double support_function(const ConvexRegion& r, UnitDirection u) {
  if (r.empty()) throw Error(ErrorCode::EmptyRegion, "support function of an empty region");
  double best = -std::numeric_limits<double>::infinity();
  for (const Point2& v : r.vertices) best = std::max(best, dot(u.vec(), v));
  return best;
}

bool polyline_self_intersects(std::span<const Point2> pts, bool closed) {
  const std::size_t n = pts.size();
  if (n < 2) return false;
  const std::size_t segs = (closed && n >= 3) ? n : n - 1;
  auto adjacent = [&](std::size_t i, std::size_t j) {
    if (j == i + 1) return true;
    return closed && n >= 3 && i == 0 && j == segs - 1;
  };
  for (std::size_t i = 0; i < segs; ++i)
    for (std::size_t j = i + 1; j < segs; ++j) {
      if (adjacent(i, j)) continue;
      if (segments_touch(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return true;
    }
  return false;
}

ConvexRegion affine_image(const ConvexRegion& r, double b11, double b12, double b21,
                          double b22, Point2 shift) {
  ConvexRegion out;
  out.kind = r.kind;
  out.vertices.reserve(r.vertices.size());
  for (const Point2& v : r.vertices)
    out.vertices.push_back({b11 * v.x + b12 * v.y + shift.x, b21 * v.x + b22 * v.y + shift.y});
  if (b11 * b22 - b12 * b21 < 0.0) std::reverse(out.vertices.begin(), out.vertices.end());
  return out;
}

}  // namespace qtomo
