#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qtomo/cli.hpp"
#include "qtomo/error.hpp"
#include "support.hpp"

using namespace qtomo;
using qtest::throws_code;
namespace fs = std::filesystem;

namespace {

CsvData parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in);
}

std::string error_text(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

struct TempDir {
  fs::path dir;
  TempDir() {
    dir = fs::temp_directory_path() / ("qtomo_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~TempDir() { fs::remove_all(dir); }
  std::string file(const std::string& name) const { return (dir / name).string(); }
};

std::string write_points(const TempDir& tmp, const std::string& name, const std::vector<Point2>& pts,
                         const std::vector<double>& t = {}) {
  const std::string path = tmp.file(name);
  std::ofstream out(path);
  out << (t.empty() ? "x,y\n" : "x,y,t\n");
  out.precision(17);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out << pts[i].x << ',' << pts[i].y;
    if (!t.empty()) out << ',' << t[i];
    out << '\n';
  }
  return path;
}

struct Outcome {
  int status;
  std::string out, err;
};

Outcome run_config(const RunConfig& cfg) {
  std::ostringstream out, err;
  const int status = run(cfg, out, err);
  return {status, out.str(), err.str()};
}

std::vector<ContourBlock> blocks_of(const std::string& csv) {
  std::istringstream in(csv);
  return read_contour_csv(in);
}

// Rebuilds a polygon from its edge lines, independent of the stored vertices'
// order of construction.
ConvexRegion reintersect(const ConvexRegion& r) {
  std::vector<Halfplane> hs;
  const auto& v = r.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    const UnitDirection s(-(b.y - a.y), b.x - a.x);  // inward normal of a CCW edge
    hs.push_back({s, 0.5 * (dot(s.vec(), a) + dot(s.vec(), b))});
  }
  return intersect_halfplanes(hs);
}

}  // namespace

TEST_CASE("csv parsing") {
  auto d = parse("x,y\n0,0\n1,1\n");
  CHECK(d.rows() == 2);
  CHECK_FALSE(d.has_covariate);
  CHECK(d.points[1] == Point2{1, 1});

  d = parse("x,y,t\n0,0,3\n");
  REQUIRE(d.rows() == 1);
  CHECK(d.has_covariate);
  CHECK(d.t[0] == 3.0);

  // Column order is free, blank lines are skipped, CRLF and a BOM are fine.
  d = parse("\xEF\xBB\xBFy,label,x\r\n2,a,1\r\n\r\n4,b,3\r\n");
  REQUIRE(d.rows() == 2);
  CHECK(d.points[0] == Point2{1, 2});
  CHECK(d.points[1] == Point2{3, 4});

  CHECK(throws_code([] { parse("x,y\n0,abc\n"); }, ErrorCode::NonNumericCell));
  const std::string msg = error_text("x,y\n0,abc\n");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("row 1") != std::string::npos);
  CHECK(msg.find("col y") != std::string::npos);
  CHECK(throws_code([] { parse(""); }, ErrorCode::EmptyFile));
  CHECK(throws_code([] { parse("x,y\n"); }, ErrorCode::EmptyFile));
  CHECK(throws_code([] { parse("x,z\n1,2\n"); }, ErrorCode::MissingColumn));
  CHECK(throws_code([] { parse("x,y\n1\n"); }, ErrorCode::MissingColumn));
  CHECK(throws_code([] { parse("x,y\n1,inf\n"); }, ErrorCode::NonFiniteValue));
  CHECK(throws_code([] { ingest_csv("/nonexistent/qtomo.csv"); }, ErrorCode::IoFailure));
}

TEST_CASE("number formatting round-trips") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> z;
  for (int i = 0; i < 1000; ++i) {
    const double v = z(rng) * std::pow(10.0, double(i % 30 - 15));
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("depth command") {
  TempDir tmp;
  RunConfig cfg;
  cfg.command = Command::Depth;
  cfg.input_path = write_points(tmp, "sq.csv", {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  cfg.point = Point2{0.5, 0.5};
  const auto r = run_config(cfg);
  CHECK(r.status == 0);
  CHECK(r.out == "depth,0.5,count,2,n,4\n");
  CHECK(r.err.empty());
}

TEST_CASE("exit codes and error lines") {
  TempDir tmp;
  std::mt19937_64 rng(72);
  const std::string data = write_points(tmp, "g.csv", qtest::gaussian_points(50, rng));

  RunConfig cfg;
  cfg.input_path = data;
  cfg.p_levels = {0.7};
  auto r = run_config(cfg);
  CHECK(r.status == 2);
  CHECK(r.err.rfind("ERR InvalidP: ", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(r.out.empty());

  cfg.p_levels = {0.1};
  cfg.directions.count = 2;
  CHECK(run_config(cfg).status == 2);

  cfg.directions.count = 36;
  cfg.input_path = tmp.file("missing.csv");
  r = run_config(cfg);
  CHECK(r.status == 3);
  CHECK(r.err.rfind("ERR IoFailure: ", 0) == 0);

  cfg.command = Command::Normal;
  cfg.input_path = write_points(tmp, "line.csv", {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  r = run_config(cfg);
  CHECK(r.status == 4);
  CHECK(r.err.rfind("ERR SingularCovariance: ", 0) == 0);

  cfg.command = Command::Regress;
  cfg.input_path = data;
  cfg.covariate_value = 1.0;
  r = run_config(cfg);
  CHECK(r.status == 3);
  CHECK(r.err.rfind("ERR MissingColumn: ", 0) == 0);
}

TEST_CASE("envelope output is deterministic and round-trips") {
  TempDir tmp;
  std::mt19937_64 rng(73);
  RunConfig cfg;
  cfg.input_path = write_points(tmp, "g.csv", qtest::gaussian_points(2000, rng));
  cfg.p_levels = {0.00625, 0.0125, 0.025, 0.05, 0.1, 0.2, 0.4};
  cfg.directions.count = 1009;
  const auto a = run_config(cfg);
  const auto b = run_config(cfg);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("p,vertex_index,x,y\n", 0) == 0);

  const auto blocks = blocks_of(a.out);
  REQUIRE(blocks.size() == cfg.p_levels.size());
  const auto envs = build_envelopes(Sample2(ingest_csv(cfg.input_path).points), cfg.p_levels,
                                    uniform_directions(1009), *empirical_estimator(QuantileVersion::InfType1));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(blocks[i].p == cfg.p_levels[i]);
    REQUIRE(blocks[i].region.kind == RegionKind::Polygon);
    CHECK(blocks[i].region.vertices == envs[i].region.vertices);
    CHECK(polygon_area(blocks[i].region.vertices) > 0);
    const auto again = reintersect(blocks[i].region);
    CHECK(hausdorff_distance(again, blocks[i].region) <= 1e-12 * std::max(1.0, region_diameter(again)));
  }

  // Written to a file instead of stdout, byte for byte the same.
  cfg.csv_path = tmp.file("out.csv");
  const auto c = run_config(cfg);
  CHECK(c.out.empty());
  std::ifstream f(cfg.csv_path);
  std::stringstream ss;
  ss << f.rdbuf();
  CHECK(ss.str() == a.out);
}

TEST_CASE("empty regions are written as a sentinel row") {
  std::ostringstream out;
  ConvexRegion empty;
  ConvexRegion pt{RegionKind::Point, {{1, 2}}, {}};
  write_contour_csv(out, {{0.5, empty}, {0.25, pt}});
  CHECK(out.str() == "p,vertex_index,x,y\n0.5,EMPTY\n0.25,0,1,2\n");
  const auto back = blocks_of(out.str());
  REQUIRE(back.size() == 2);
  CHECK(back[0].region.empty());
  CHECK(back[1].region.kind == RegionKind::Point);
}

TEST_CASE("rescaling the input columns rescales the contours") {
  TempDir tmp;
  std::mt19937_64 rng(74);
  const auto pts = qtest::gaussian_points(25, rng);
  std::vector<Point2> scaled;
  for (const auto& p : pts) scaled.push_back({3.0 * p.x, 0.2 * p.y});
  RunConfig cfg;
  cfg.directions.critical = true;
  cfg.p_levels = {0.08, 0.2, 0.4};
  cfg.input_path = write_points(tmp, "a.csv", pts);
  const auto plain = blocks_of(run_config(cfg).out);
  cfg.input_path = write_points(tmp, "b.csv", scaled);
  const auto moved = blocks_of(run_config(cfg).out);
  REQUIRE(plain.size() == moved.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    REQUIRE(plain[i].region.empty() == moved[i].region.empty());
    if (plain[i].region.empty()) continue;
    const auto mapped = affine_image(plain[i].region, 3.0, 0, 0, 0.2, {0, 0});
    CHECK(hausdorff_distance(mapped, moved[i].region) <= 1e-9 * std::max(1.0, region_diameter(mapped)));
  }
}

TEST_CASE("other commands") {
  TempDir tmp;
  std::mt19937_64 rng(75);
  const auto pts = qtest::gaussian_points(400, rng);
  std::vector<double> t;
  for (std::size_t i = 0; i < pts.size(); ++i) t.push_back(double(i % 10));
  const std::string data = write_points(tmp, "t.csv", pts, t);

  RunConfig cfg;
  cfg.input_path = data;
  cfg.directions.count = 72;

  cfg.command = Command::Biplot;
  auto r = run_config(cfg);
  REQUIRE(r.status == 0);
  // Header plus one row per direction; the curve closes implicitly.
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1 + 72);

  cfg.command = Command::Normal;
  cfg.masses = {0.5, 0.9};
  r = run_config(cfg);
  REQUIRE(r.status == 0);
  CHECK(blocks_of(r.out).size() == 2);
  cfg.masses.clear();

  cfg.command = Command::Coverage;
  cfg.coverage = 0.5;
  r = run_config(cfg);
  REQUIRE(r.status == 0);
  const auto cov = blocks_of(r.out);
  REQUIRE(cov.size() == 1);
  CHECK(double(count_enclosed(cov[0].region, Sample2(pts))) >= 0.5 * double(pts.size()));

  cfg.command = Command::Extreme;
  cfg.p_levels = {1e-4};
  r = run_config(cfg);
  REQUIRE(r.status == 0);
  CHECK(blocks_of(r.out).size() == 1);

  cfg.command = Command::Regress;
  cfg.p_levels = {0.1};
  cfg.covariate_value = 4.5;
  r = run_config(cfg);
  REQUIRE(r.status == 0);
  CHECK(blocks_of(r.out).size() == 1);
  cfg.covariate_value = 20.0;
  CHECK(run_config(cfg).status == 2);

  cfg.command = Command::Median;
  cfg.median_point = true;
  r = run_config(cfg);
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("median,", 0) == 0);
}

TEST_CASE("svg rendering") {
  TempDir tmp;
  std::mt19937_64 rng(76);
  RunConfig cfg;
  cfg.input_path = write_points(tmp, "g.csv", qtest::gaussian_points(300, rng));
  cfg.p_levels = {0.05, 0.2};
  cfg.directions.count = 100;
  cfg.svg_path = tmp.file("out.svg");
  REQUIRE(run_config(cfg).status == 0);
  std::ifstream f(cfg.svg_path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string svg = ss.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("viewBox") != std::string::npos);
  std::size_t paths = 0;
  for (std::size_t at = svg.find("<path"); at != std::string::npos; at = svg.find("<path", at + 1)) ++paths;
  CHECK(paths == 2);
  std::size_t dots = 0;
  for (std::size_t at = svg.find("<circle"); at != std::string::npos; at = svg.find("<circle", at + 1)) ++dots;
  CHECK(dots == 300);
}
