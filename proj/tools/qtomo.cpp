#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtomo/cli.hpp"
#include "qtomo/error.hpp"

namespace {

using qtomo::Error;
using qtomo::ErrorCode;

double to_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw Error(ErrorCode::InvalidConfig, what + ": '" + s + "' is not a number");
  return v;
}

std::vector<double> to_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    out.push_back(to_double(s.substr(start, comma - start), what));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

qtomo::Point2 to_point(const std::string& s, const std::string& what) {
  const auto v = to_list(s, what);
  if (v.size() != 2) throw Error(ErrorCode::InvalidConfig, what + " expects x,y");
  return {v[0], v[1]};
}

struct RawOptions {
  std::string input;
  std::string p = "0.1";
  std::string directions = "360";
  std::string version = "type1";
  std::string estimator = "empirical";
  double threshold = 0.1;
  std::string origin = "median";
  double coverage = 0.5;
  std::string t;
  std::string point;
  std::string mass;
  std::size_t vertices = 256;
  std::string csv;
  std::string svg;
  bool no_scatter = false;
  bool as_point = false;
};

qtomo::RunConfig to_config(const std::string& command, const RawOptions& o) {
  using qtomo::Command;
  qtomo::RunConfig cfg;
  static const std::pair<const char*, Command> names[] = {
      {"envelope", Command::Envelope}, {"biplot", Command::Biplot},
      {"normal", Command::Normal},     {"coverage", Command::Coverage},
      {"extreme", Command::Extreme},   {"regress", Command::Regress},
      {"depth", Command::Depth},       {"median", Command::Median}};
  for (const auto& [name, cmd] : names)
    if (command == name) cfg.command = cmd;
  cfg.input_path = o.input;
  cfg.p_levels = to_list(o.p, "--p");
  if (o.directions == "critical") {
    cfg.directions.critical = true;
  } else {
    const double d = to_double(o.directions, "--directions");
    if (d != static_cast<double>(static_cast<long long>(d)) || d < 0)
      throw Error(ErrorCode::InvalidConfig, "--directions expects an integer or 'critical'");
    cfg.directions.count = static_cast<std::size_t>(d);
  }
  if (o.version == "type1")
    cfg.version = qtomo::QuantileVersion::InfType1;
  else if (o.version == "r7")
    cfg.version = qtomo::QuantileVersion::InterpolatedR7;
  else
    throw Error(ErrorCode::InvalidConfig, "--version expects type1 or r7");
  cfg.estimator = o.estimator;
  cfg.threshold_fraction = o.threshold;
  if (o.origin == "median") {
    cfg.origin.kind = qtomo::OriginChoice::Kind::Median;
  } else if (o.origin == "tukey") {
    cfg.origin.kind = qtomo::OriginChoice::Kind::Tukey;
  } else {
    cfg.origin.kind = qtomo::OriginChoice::Kind::Fixed;
    cfg.origin.point = to_point(o.origin, "--origin");
  }
  cfg.coverage = o.coverage;
  if (!o.t.empty()) cfg.covariate_value = to_double(o.t, "--t");
  if (!o.point.empty()) cfg.point = to_point(o.point, "--point");
  if (!o.mass.empty()) cfg.masses = to_list(o.mass, "--mass");
  cfg.normal_vertices = o.vertices;
  cfg.csv_path = o.csv;
  cfg.svg_path = o.svg;
  cfg.scatter = !o.no_scatter;
  cfg.median_point = o.as_point;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional quantile envelopes and halfspace depth contours for 2-D point clouds"};
  app.require_subcommand(1);
  RawOptions o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "CSV file with columns x,y[,t]")->required();
    sub->add_option("--csv", o.csv, "Write CSV here instead of stdout");
    sub->add_option("--svg", o.svg, "Also write an SVG rendering");
    sub->add_flag("--no-scatter", o.no_scatter, "Omit the data points from the SVG");
  };
  auto add_levels = [&](CLI::App* sub) {
    sub->add_option("--p", o.p, "Comma-separated levels in (0, 1/2]");
  };
  auto add_directions = [&](CLI::App* sub) {
    sub->add_option("--directions", o.directions,
                    "Number of equispaced directions, or 'critical' for the exact "
                    "pair-normal set (quadratic in n)");
  };
  auto add_estimator = [&](CLI::App* sub) {
    sub->add_option("--version", o.version, "Quantile version: type1 or r7");
    sub->add_option("--estimator", o.estimator, "empirical or extreme");
    sub->add_option("--threshold", o.threshold, "Tail fraction for the extreme estimator");
  };

  auto* envelope = app.add_subcommand("envelope", "Quantile envelopes at one or more levels");
  add_common(envelope), add_levels(envelope), add_directions(envelope), add_estimator(envelope);

  auto* extreme = app.add_subcommand("extreme", "Envelopes from a generalized Pareto tail fit");
  add_common(extreme), add_levels(extreme), add_directions(extreme);
  extreme->add_option("--threshold", o.threshold, "Tail fraction used for the fit");

  auto* biplot = app.add_subcommand("biplot", "Quantile biplot curves around an origin");
  add_common(biplot), add_levels(biplot), add_directions(biplot), add_estimator(biplot);
  biplot->add_option("--origin", o.origin, "median, tukey, or x,y");

  auto* normal = app.add_subcommand("normal", "Contours of the fitted bivariate normal");
  add_common(normal), add_levels(normal);
  normal->add_option("--mass", o.mass, "Enclosed-mass levels in (0, 1); replaces --p");
  normal->add_option("--vertices", o.vertices, "Vertices per contour");

  auto* coverage = app.add_subcommand("coverage", "Envelope enclosing a prescribed fraction");
  add_common(coverage), add_directions(coverage), add_estimator(coverage);
  coverage->add_option("--coverage", o.coverage, "Target enclosed fraction");

  auto* regress = app.add_subcommand("regress", "Conditional envelopes at a covariate value");
  add_common(regress), add_levels(regress), add_directions(regress);
  regress->add_option("--t", o.t, "Covariate value")->required();

  auto* depth = app.add_subcommand("depth", "Halfspace depth of a point");
  add_common(depth);
  depth->add_option("--point", o.point, "Query point x,y")->required();

  auto* median = app.add_subcommand("median", "Tukey median region");
  add_common(median);
  median->add_flag("--as-point", o.as_point, "Print the region centroid instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (char& c : msg)
      if (c == '\n') c = ' ';
    std::cerr << "ERR InvalidConfig: " << msg << '\n';
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  qtomo::RunConfig cfg;
  try {
    cfg = to_config(command, o);
  } catch (const Error& e) {
    std::cerr << "ERR " << qtomo::code_name(e.code()) << ": " << e.what() << '\n';
    return 2;
  }
  return qtomo::run(cfg, std::cout, std::cerr);
}
