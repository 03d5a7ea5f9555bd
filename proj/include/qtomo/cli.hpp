#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtomo/envelope.hpp"
#include "qtomo/geom.hpp"
#include "qtomo/normalfit.hpp"
#include "qtomo/quantile.hpp"

namespace qtomo {

/// Parsed `x,y[,t]` table.
struct CsvData {
  std::vector<Point2> points;
  std::vector<double> t;  // empty unless a `t` column exists
  bool has_covariate = false;

  std::size_t rows() const { return points.size(); }
};

/// Reads a CSV with a header row naming at least `x` and `y` (any order,
/// optional `t`). Errors carry the 1-based data row and the column name.
CsvData parse_csv(std::istream& in);
CsvData ingest_csv(const std::string& path);

enum class Command { Envelope, Biplot, Normal, Coverage, Extreme, Regress, Depth, Median };

struct DirectionsChoice {
  bool critical = false;
  std::size_t count = 360;
};

struct OriginChoice {
  enum class Kind { Median, Tukey, Fixed };
  Kind kind = Kind::Median;
  Point2 point;
};

struct RunConfig {
  Command command = Command::Envelope;
  std::string input_path;
  std::vector<double> p_levels{0.1};
  DirectionsChoice directions;
  QuantileVersion version = QuantileVersion::InfType1;
  /// "empirical" or "extreme".
  std::string estimator = "empirical";
  double threshold_fraction = 0.1;
  OriginChoice origin;
  double coverage = 0.5;
  std::optional<double> covariate_value;
  /// `depth`: the query point.
  std::optional<Point2> point;
  /// `median`: print the centroid of the median region instead of it.
  bool median_point = false;
  /// `normal`: enclosed-mass levels; when nonempty they replace the
  /// tangent-mass levels in p_levels.
  std::vector<double> masses;
  std::size_t normal_vertices = 256;
  std::string csv_path;  // empty: stdout
  std::string svg_path;  // empty: no SVG
  bool scatter = true;
};

/// Throws InvalidConfig / InvalidP / TooFewDirections on bad settings.
void validate(const RunConfig& cfg);

/// Executes the command. CSV goes to cfg.csv_path or `out`; failures are
/// reported on `err` as a single `ERR <code>: <detail>` line. Returns the
/// process exit status: 0 ok, 2 config error, 3 data error, 4 numeric
/// degeneracy.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// One contour block of the `p,vertex_index,x,y` format.
struct ContourBlock {
  double p = 0.0;
  ConvexRegion region;
};

std::string format_double(double v);
void write_contour_csv(std::ostream& out, const std::vector<ContourBlock>& blocks);
void write_polyline_csv(std::ostream& out, double p, const std::vector<Point2>& pts);
/// Reads back `p,vertex_index,x,y`; region kinds are inferred from the
/// vertex count (EMPTY rows give Empty regions).
std::vector<ContourBlock> read_contour_csv(std::istream& in);

struct SvgLayer {
  std::vector<Point2> path;
  bool closed = true;
};

void write_svg(std::ostream& out, const std::vector<Point2>& scatter,
               const std::vector<SvgLayer>& layers);

}  // namespace qtomo
