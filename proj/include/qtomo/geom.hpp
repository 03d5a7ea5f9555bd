#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qtomo {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double c, Point2 a) { return {c * a.x, c * a.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double norm(Point2 a);

/// A point of the unit circle. Construction normalizes; the zero vector is
/// rejected.
class UnitDirection {
 public:
  UnitDirection() = default;
  UnitDirection(double x, double y);

  static UnitDirection from_angle(double theta);

  double x() const { return x_; }
  double y() const { return y_; }
  Point2 vec() const { return {x_, y_}; }
  /// Angle in [0, 2*pi).
  double angle() const;
  UnitDirection operator-() const;

 private:
  double x_ = 1.0;
  double y_ = 0.0;
};

/// The closed halfplane {x : s'x >= q}.
struct Halfplane {
  UnitDirection s;
  double q = 0.0;

  bool contains(Point2 p, double tol = 0.0) const {
    return dot(s.vec(), p) >= q - tol;
  }
};

enum class RegionKind { Empty, Point, Segment, Polygon };

/// Result of a halfplane intersection or any other convex shape.
///
/// Polygon vertices are CCW. `active` holds indices into the halfplane list
/// the region was built from: for polygons, edge i runs from vertices[i] to
/// vertices[i+1] and lies on halfplane active[i]. Regions not built from
/// halfplanes leave `active` empty.
struct ConvexRegion {
  RegionKind kind = RegionKind::Empty;
  std::vector<Point2> vertices;
  std::vector<std::size_t> active;

  bool empty() const { return kind == RegionKind::Empty; }
};

/// Tolerances used by the intersection kernel, scaled by the largest
/// absolute offset of the input (at least 1).
struct IntersectionTolerance {
  /// Normals closer than this (radians) are treated as parallel.
  double parallel_angle = 1e-10;
  /// Relative slack used to decide feasibility of collapsed regions.
  double relax = 1e-12;
  /// Relative width below which a region is reported as Point/Segment.
  double collapse = 1e-9;
};

/// Intersects the halfplanes. Runs in O(n) when the normals are already in
/// increasing angle order and O(n log n) otherwise.
///
/// Throws UnboundedRegion when all normals fit in a closed half circle.
ConvexRegion intersect_halfplanes(std::span<const Halfplane> hs,
                                  const IntersectionTolerance& tol = {});

/// Pompeiu-Hausdorff distance between two nonempty convex regions.
double hausdorff_distance(const ConvexRegion& a, const ConvexRegion& b);

/// Euclidean distance from p to the (filled) region; 0 inside.
double distance_to_region(Point2 p, const ConvexRegion& r);

/// Closed membership test with an absolute tolerance.
bool region_contains(const ConvexRegion& r, Point2 p, double tol = 1e-9);

/// Signed distance to the region boundary: negative inside a polygon,
/// positive outside. For Point/Segment this is the plain distance.
double signed_boundary_distance(const ConvexRegion& r, Point2 p);

/// Largest sqrt(2 / (1 + cos)) over vertices, where cos is taken between the
/// normals of the two edges meeting at the vertex.
double kappa(const ConvexRegion& r);

/// max over the region of u'x.
double support_function(const ConvexRegion& r, UnitDirection u);

/// True iff two non-adjacent segments of the polyline touch or cross.
bool polyline_self_intersects(std::span<const Point2> pts, bool closed);

/// Convex hull (Andrew's monotone chain), CCW, collinear points dropped.
std::vector<Point2> convex_hull(std::vector<Point2> pts);

/// Classifies a convex point cloud into Empty/Point/Segment/Polygon, using
/// `collapse_width` (absolute) as the degeneracy threshold.
ConvexRegion region_from_points(std::vector<Point2> pts, double collapse_width);

double polygon_area(std::span<const Point2> ccw);
Point2 vertex_centroid(const ConvexRegion& r);
/// Largest distance between two vertices.
double region_diameter(const ConvexRegion& r);

/// Applies x -> B x + b with B = [[b11, b12], [b21, b22]]; keeps the
/// vertices CCW (reverses order if det B < 0). `active` is dropped.
ConvexRegion affine_image(const ConvexRegion& r, double b11, double b12,
                          double b21, double b22, Point2 shift);

}  // namespace qtomo
