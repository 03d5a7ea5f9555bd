#include "qtomo/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string_view>

#include "qtomo/depth.hpp"
#include "qtomo/error.hpp"
#include "qtomo/estimators.hpp"

namespace qtomo {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_number(std::string_view cell, double& value) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

}  // namespace

CsvData parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyFile, "line 1: file is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split(line);
  auto column = [&](std::string_view name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
  };
  const std::ptrdiff_t cx = column("x"), cy = column("y"), ct = column("t");
  if (cx < 0 || cy < 0)
    throw Error(ErrorCode::MissingColumn,
                std::string("line 1: header lacks column ") + (cx < 0 ? "x" : "y"));

  CsvData data;
  data.has_covariate = ct >= 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    const std::size_t row = data.rows() + 1;
    auto read = [&](std::ptrdiff_t col, std::string_view name) {
      if (static_cast<std::size_t>(col) >= cells.size())
        throw Error(ErrorCode::MissingColumn, "line " + std::to_string(line_no) + " (row " +
                                                  std::to_string(row) + "): no value for column " +
                                                  std::string(name));
      double v = 0.0;
      if (!parse_number(cells[static_cast<std::size_t>(col)], v))
        throw Error(ErrorCode::NonNumericCell,
                    "line " + std::to_string(line_no) + " (row " + std::to_string(row) +
                        ", col " + std::string(name) + "): '" +
                        std::string(cells[static_cast<std::size_t>(col)]) + "' is not a number");
      if (!std::isfinite(v))
        throw Error(ErrorCode::NonFiniteValue, "line " + std::to_string(line_no) + " (row " +
                                                   std::to_string(row) + ", col " +
                                                   std::string(name) + "): value is not finite");
      return v;
    };
    const double x = read(cx, "x");
    const double y = read(cy, "y");
    data.points.push_back({x, y});
    if (data.has_covariate) data.t.push_back(read(ct, "t"));
  }
  if (data.points.empty())
    throw Error(ErrorCode::EmptyFile, "line " + std::to_string(line_no) + ": no data rows");
  return data;
}

CsvData ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
  return parse_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_contour_csv(std::ostream& out, const std::vector<ContourBlock>& blocks) {
  out << "p,vertex_index,x,y\n";
  for (const auto& b : blocks) {
    if (b.region.empty()) {
      out << format_double(b.p) << ",EMPTY\n";
      continue;
    }
    for (std::size_t i = 0; i < b.region.vertices.size(); ++i)
      out << format_double(b.p) << ',' << i << ',' << format_double(b.region.vertices[i].x) << ','
          << format_double(b.region.vertices[i].y) << '\n';
  }
}

void write_polyline_csv(std::ostream& out, double p, const std::vector<Point2>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << format_double(p) << ',' << i << ',' << format_double(pts[i].x) << ','
        << format_double(pts[i].y) << '\n';
}

std::vector<ContourBlock> read_contour_csv(std::istream& in) {
  std::vector<ContourBlock> blocks;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    double p = 0.0;
    if (cells.empty() || !parse_number(cells[0], p))
      throw Error(ErrorCode::NonNumericCell, "bad contour row '" + line + "'");
    if (cells.size() == 2 && cells[1] == "EMPTY") {
      blocks.push_back({p, {}});
      continue;
    }
    double idx = 0.0, x = 0.0, y = 0.0;
    if (cells.size() != 4 || !parse_number(cells[1], idx) || !parse_number(cells[2], x) ||
        !parse_number(cells[3], y))
      throw Error(ErrorCode::NonNumericCell, "bad contour row '" + line + "'");
    if (idx == 0.0) blocks.push_back({p, {}});
    blocks.back().region.vertices.push_back({x, y});
  }
  for (auto& b : blocks) {
    const std::size_t m = b.region.vertices.size();
    b.region.kind = m == 0   ? RegionKind::Empty
                    : m == 1 ? RegionKind::Point
                    : m == 2 ? RegionKind::Segment
                             : RegionKind::Polygon;
  }
  return blocks;
}

void write_svg(std::ostream& out, const std::vector<Point2>& scatter,
               const std::vector<SvgLayer>& layers) {
  double minx = INFINITY, miny = INFINITY, maxx = -INFINITY, maxy = -INFINITY;
  auto grow = [&](Point2 p) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  };
  for (const Point2& p : scatter) grow(p);
  for (const auto& l : layers)
    for (const Point2& p : l.path) grow(p);
  if (!std::isfinite(minx)) minx = miny = 0.0, maxx = maxy = 1.0;
  double w = maxx - minx, h = maxy - miny;
  if (w <= 0.0) w = 1.0;
  if (h <= 0.0) h = 1.0;
  minx -= 0.05 * w;
  maxy += 0.05 * h;
  w *= 1.1;
  h *= 1.1;
  const double dot_r = 0.004 * std::max(w, h);

  // The group flips y so data coordinates can be written unchanged.
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\""
      << format_double(minx) << ' ' << format_double(-maxy) << ' ' << format_double(w) << ' '
      << format_double(h) << "\">\n"
      << "<g transform=\"scale(1,-1)\">\n";
  if (!scatter.empty()) {
    out << "<g fill=\"#888888\">\n";
    for (const Point2& p : scatter)
      out << "<circle cx=\"" << format_double(p.x) << "\" cy=\"" << format_double(p.y)
          << "\" r=\"" << format_double(dot_r) << "\"/>\n";
    out << "</g>\n";
  }
  for (const auto& l : layers) {
    if (l.path.empty()) continue;
    out << "<path fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1\" "
           "vector-effect=\"non-scaling-stroke\" d=\"";
    for (std::size_t i = 0; i < l.path.size(); ++i)
      out << (i == 0 ? 'M' : 'L') << format_double(l.path[i].x) << ' '
          << format_double(l.path[i].y) << ' ';
    if (l.closed) out << 'Z';
    out << "\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

void validate(const RunConfig& cfg) {
  if (cfg.input_path.empty()) throw Error(ErrorCode::InvalidConfig, "no input file given");
  const bool uses_levels = cfg.command != Command::Depth && cfg.command != Command::Median &&
                           cfg.command != Command::Coverage &&
                           !(cfg.command == Command::Normal && !cfg.masses.empty());
  if (uses_levels) {
    if (cfg.p_levels.empty()) throw Error(ErrorCode::InvalidConfig, "no p levels given");
    for (double p : cfg.p_levels) require_envelope_level(p);
  }
  for (double m : cfg.masses)
    if (!(m > 0.0 && m < 1.0)) throw Error(ErrorCode::InvalidP, "enclosed mass must lie in (0, 1)");
  if (!cfg.directions.critical && cfg.directions.count < 3)
    throw Error(ErrorCode::TooFewDirections, "need at least 3 directions");
  if (cfg.estimator != "empirical" && cfg.estimator != "extreme")
    throw Error(ErrorCode::InvalidConfig, "unknown estimator '" + cfg.estimator + "'");
  if (!(cfg.threshold_fraction > 0.0 && cfg.threshold_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "threshold fraction must lie in (0, 1)");
  if (!(cfg.coverage > 0.0 && cfg.coverage <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "coverage must lie in (0, 1]");
  if (cfg.normal_vertices < 16)
    throw Error(ErrorCode::InvalidConfig, "contours need at least 16 vertices");
  if (cfg.command == Command::Depth && !cfg.point)
    throw Error(ErrorCode::InvalidConfig, "depth needs --point x,y");
  if (cfg.command == Command::Regress && !cfg.covariate_value)
    throw Error(ErrorCode::InvalidConfig, "regress needs --t <covariate value>");
}

namespace {

DirectionSet make_directions(const RunConfig& cfg, const Sample2& s) {
  return cfg.directions.critical ? DirectionSet::critical(s)
                                 : uniform_directions(cfg.directions.count);
}

EstimatorPtr make_estimator(const RunConfig& cfg) {
  if (cfg.command == Command::Extreme || cfg.estimator == "extreme")
    return extreme_estimator(cfg.threshold_fraction);
  return empirical_estimator(cfg.version);
}

Point2 resolve_origin(const RunConfig& cfg, const Sample2& s) {
  switch (cfg.origin.kind) {
    case OriginChoice::Kind::Median: return coordinatewise_median(s);
    case OriginChoice::Kind::Tukey: return vertex_centroid(tukey_median(s).region);
    case OriginChoice::Kind::Fixed: return cfg.origin.point;
  }
  return {};
}

SvgLayer layer_of(const ConvexRegion& r) {
  return {r.vertices, r.kind != RegionKind::Point && r.kind != RegionKind::Segment};
}

void execute(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const CsvData data = ingest_csv(cfg.input_path);
  const Sample2 sample(data.points);

  std::vector<ContourBlock> blocks;
  std::vector<SvgLayer> layers;
  std::ostringstream csv;

  switch (cfg.command) {
    case Command::Envelope:
    case Command::Extreme: {
      const auto est = make_estimator(cfg);
      const auto envs = build_envelopes(sample, cfg.p_levels, make_directions(cfg, sample), *est);
      for (const auto& e : envs) blocks.push_back({e.p, e.region});
      break;
    }
    case Command::Coverage: {
      const auto est = make_estimator(cfg);
      const auto res = coverage_search(sample, cfg.coverage, make_directions(cfg, sample), *est);
      blocks.push_back({res.p, res.envelope.region});
      break;
    }
    case Command::Regress: {
      if (!data.has_covariate)
        throw Error(ErrorCode::MissingColumn, "line 1: regress needs a t column");
      const CovariateSample cs{sample, data.t};
      const DirectionSet dirs = make_directions(cfg, sample);
      for (double p : cfg.p_levels)
        blocks.push_back({p, conditional_envelope(cs, *cfg.covariate_value, p, dirs).region});
      break;
    }
    case Command::Normal: {
      const NormalFit fit = fit_normal(sample);
      if (!cfg.masses.empty()) {
        for (double m : cfg.masses)
          blocks.push_back({m, normal_contour(fit, IndexingMode::enclosed(m), cfg.normal_vertices)});
      } else {
        for (double p : cfg.p_levels)
          blocks.push_back({p, normal_contour(fit, IndexingMode::tangent(p), cfg.normal_vertices)});
      }
      break;
    }
    case Command::Biplot: {
      const auto est = make_estimator(cfg);
      const Point2 origin = resolve_origin(cfg, sample);
      const DirectionSet dirs = make_directions(cfg, sample);
      csv << "p,vertex_index,x,y\n";
      for (double p : cfg.p_levels) {
        auto curve = biplot_curve(sample, p, origin, dirs, *est);
        write_polyline_csv(csv, p, curve);
        layers.push_back({std::move(curve), true});
      }
      break;
    }
    case Command::Depth: {
      const DepthValue d = halfspace_depth(sample, *cfg.point);
      csv << "depth," << format_double(d.value) << ",count," << d.count << ",n," << d.n << '\n';
      break;
    }
    case Command::Median: {
      const TukeyMedian tm = tukey_median(sample);
      if (cfg.median_point) {
        const Point2 c = vertex_centroid(tm.region);
        csv << "median," << format_double(c.x) << ',' << format_double(c.y) << '\n';
      } else {
        blocks.push_back({tm.p_max, tm.region});
      }
      break;
    }
  }

  if (!blocks.empty()) {
    write_contour_csv(csv, blocks);
    for (const auto& b : blocks)
      if (!b.region.empty()) layers.push_back(layer_of(b.region));
  }

  if (cfg.csv_path.empty()) {
    out << csv.str();
  } else {
    std::ofstream f(cfg.csv_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write '" + cfg.csv_path + "'");
    f << csv.str();
  }
  if (!cfg.svg_path.empty()) {
    std::ofstream f(cfg.svg_path, std::ios::binary);
    if (!f) throw Error(ErrorCode::IoFailure, "cannot write '" + cfg.svg_path + "'");
    write_svg(f, cfg.scatter ? data.points : std::vector<Point2>{}, layers);
  }
}

int exit_status(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Data: return 3;
    case ErrorCategory::Numeric: return 4;
  }
  return 4;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    execute(cfg, out);
    return 0;
  } catch (const Error& e) {
    err << "ERR " << code_name(e.code()) << ": " << one_line(e.what()) << '\n';
    return exit_status(category_of(e.code()));
  } catch (const std::bad_alloc&) {
    err << "ERR OutOfMemory: allocation failed\n";
    return 4;
  }
}

}  // namespace qtomo
