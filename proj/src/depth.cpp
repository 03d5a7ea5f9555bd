#include "qtomo/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qtomo/error.hpp"

namespace qtomo {

namespace {

void require_nonempty(const Sample2& s) {
  if (s.size() == 0) throw Error(ErrorCode::EmptySample, "sample has no points");
}

}  // namespace

DepthValue halfspace_depth(const Sample2& s, Point2 x) {
  require_nonempty(s);
  const std::size_t n = s.size();
  std::size_t at_x = 0;
  struct Ray {
    Point2 v;
    double angle;
  };
  std::vector<Ray> rays;
  rays.reserve(n);
  for (const Point2& p : s.points()) {
    const Point2 v = p - x;
    if (v.x == 0.0 && v.y == 0.0) {
      ++at_x;
      continue;
    }
    rays.push_back({v, std::atan2(v.y, v.x)});
  }
  const std::size_t m = rays.size();
  if (m == 0) return {n, n, 1.0};
  std::sort(rays.begin(), rays.end(),
            [](const Ray& a, const Ray& b) { return a.angle < b.angle; });
  auto same_ray = [](Point2 a, Point2 b) { return cross(a, b) == 0.0 && dot(a, b) > 0.0; };

  std::size_t best = m;
  std::size_t end = 0;  // absolute index into the doubled ray sequence
  for (std::size_t start = 0; start < m;) {
    const Point2 g = rays[start].v;
    std::size_t group = 1;
    while (start + group < m && same_ray(g, rays[start + group].v)) ++group;
    end = std::max(end, start + group);
    while (end < start + m && cross(g, rays[end % m].v) > 0.0) ++end;
    const std::size_t left = end - (start + group);
    std::size_t opposite = 0;
    while (end + opposite < start + m) {
      const Point2 w = rays[(end + opposite) % m].v;
      if (cross(g, w) == 0.0 && dot(g, w) < 0.0)
        ++opposite;
      else
        break;
    }
    const std::size_t right = m - left - group - opposite;
    best = std::min({best, left + group, left + opposite, right + group, right + opposite});
    start += group;
  }
  const std::size_t count = at_x + best;
  return {count, n, static_cast<double>(count) / static_cast<double>(n)};
}

std::vector<UnitDirection> critical_directions(const Sample2& s) {
  require_nonempty(s);
  std::vector<UnitDirection> dirs{UnitDirection(1, 0), UnitDirection(0, 1),
                                  UnitDirection(-1, 0), UnitDirection(0, -1)};
  const auto pts = s.points();
  dirs.reserve(4 + pts.size() * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Point2 d = pts[j] - pts[i];
      if (d.x == 0.0 && d.y == 0.0) continue;
      const UnitDirection normal(-d.y, d.x);
      dirs.push_back(normal);
      dirs.push_back(-normal);
    }
  std::vector<std::pair<double, UnitDirection>> keyed;
  keyed.reserve(dirs.size());
  for (const auto& d : dirs) keyed.emplace_back(d.angle(), d);
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<UnitDirection> out;
  out.reserve(keyed.size());
  double last = -1.0;
  for (const auto& [angle, d] : keyed) {
    if (!out.empty() && angle - last < 1e-12) continue;
    out.push_back(d);
    last = angle;
  }
  if (out.size() > 1 && out.front().angle() + 2.0 * std::numbers::pi - last < 1e-12)
    out.pop_back();
  return out;
}

ConvexRegion depth_region_oracle(const Sample2& s, double p) {
  require_nonempty(s);
  require_open_probability(p);
  const std::size_t n = s.size();
  const std::size_t k = type1_rank(p, n);
  const std::vector<UnitDirection> dirs = critical_directions(s);

  struct Line {
    Point2 s;
    double q;
  };
  std::vector<Line> lines;
  lines.reserve(dirs.size());
  double scale = 1.0;
  for (const UnitDirection& d : dirs) {
    std::vector<double> z = s.project(d);
    std::sort(z.begin(), z.end());
    lines.push_back({d.vec(), z[k - 1]});
    scale = std::max(scale, std::abs(z[k - 1]));
  }
  const IntersectionTolerance tol;
  const double slack = tol.relax * scale;

  // Feasible piece of each boundary line against all other halfplanes.
  std::vector<Point2> pieces;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const Point2 base = lines[i].q * lines[i].s;
    const Point2 along{-lines[i].s.y, lines[i].s.x};
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (std::size_t j = 0; j < lines.size() && feasible; ++j) {
      if (j == i) continue;
      // s_j'(base + t along) >= q_j - slack  <=>  a t >= b
      const double a = dot(lines[j].s, along);
      const double b = lines[j].q - slack - dot(lines[j].s, base);
      if (std::abs(a) <= 1e-12) {
        if (b > 0.0) feasible = false;
      } else if (a > 0.0) {
        lo = std::max(lo, b / a);
      } else {
        hi = std::min(hi, b / a);
      }
      if (lo > hi) feasible = false;
    }
    if (!feasible) continue;
    pieces.push_back(base + lo * along);
    pieces.push_back(base + hi * along);
  }
  return region_from_points(std::move(pieces), tol.collapse * scale);
}

std::size_t tangent_count(const Sample2& s, const Halfplane& h, double tol) {
  require_nonempty(s);
  std::size_t count = 0;
  for (const Point2& p : s.points())
    if (dot(h.s.vec(), p) <= h.q + tol) ++count;
  return count;
}

double tangent_mass(const Sample2& s, const Halfplane& h, double tol) {
  return static_cast<double>(tangent_count(s, h, tol)) / static_cast<double>(s.size());
}

std::size_t max_hyperplane_count(const Sample2& s) {
  require_nonempty(s);
  const auto pts = s.points();
  const std::size_t n = pts.size();
  std::size_t best = 1;
  std::vector<std::pair<double, Point2>> dirs;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t same = 0;
    dirs.clear();
    for (std::size_t j = 0; j < n; ++j) {
      Point2 v = pts[j] - pts[i];
      if (v.x == 0.0 && v.y == 0.0) {
        ++same;
        continue;
      }
      if (v.y < 0.0 || (v.y == 0.0 && v.x < 0.0)) v = -1.0 * v;
      dirs.emplace_back(std::atan2(v.y, v.x), v);
    }
    best = std::max(best, same);
    std::sort(dirs.begin(), dirs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    auto collinear = [](Point2 a, Point2 b) {
      return std::abs(cross(a, b)) <= 1e-9 * norm(a) * norm(b);
    };
    for (std::size_t a = 0; a < dirs.size();) {
      std::size_t b = a + 1;
      while (b < dirs.size() && collinear(dirs[a].second, dirs[b].second)) ++b;
      std::size_t run = b - a;
      // Directions near 0 and near pi describe the same line.
      if (a == 0)
        for (std::size_t t = dirs.size(); t-- > b;) {
          if (!collinear(dirs[a].second, dirs[t].second)) break;
          ++run;
        }
      best = std::max(best, same + run);
      a = b;
    }
  }
  return best;
}

double max_hyperplane_mass(const Sample2& s) {
  return static_cast<double>(max_hyperplane_count(s)) / static_cast<double>(s.size());
}

ConvexRegion rank_envelope_region(const Sample2& s, std::size_t k,
                                  const std::vector<UnitDirection>& dirs) {
  std::vector<Halfplane> hs;
  hs.reserve(dirs.size());
  std::vector<double> z;
  for (const UnitDirection& d : dirs) {
    z = s.project(d);
    auto nth = z.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(z.begin(), nth, z.end());
    hs.push_back({d, *nth});
  }
  return intersect_halfplanes(hs);
}

TukeyMedian tukey_median(const Sample2& s) {
  require_nonempty(s);
  const std::size_t n = s.size();
  const std::vector<UnitDirection> dirs = critical_directions(s);
  // Level sets are nested, so nonemptiness is monotone in k; k = 1 always
  // yields the convex hull.
  std::size_t lo = 1, hi = n;
  ConvexRegion best = rank_envelope_region(s, 1, dirs);
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    ConvexRegion r = rank_envelope_region(s, mid, dirs);
    if (!r.empty()) {
      lo = mid;
      best = std::move(r);
    } else {
      hi = mid - 1;
    }
  }
  return {static_cast<double>(lo) / static_cast<double>(n), lo, std::move(best)};
}

}  // namespace qtomo
