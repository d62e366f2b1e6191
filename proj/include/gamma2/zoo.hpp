#pragma once

/// \file
/// Built-in reference spaces with closed-form curvature data.

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gamma2/suite.hpp"

namespace gamma2 {

/// A closed-form value the certifier should reproduce, with where it comes from.
struct ExpectedValue {
  std::string quantity;
  double value = 0.0;
  std::string source;
};

struct ZooEntry {
  std::string name;
  std::map<std::string, double> params;
  Problem problem;
  std::vector<ExpectedValue> expected;
  bool interior_flat = false;
  bool boundary_minimal = false;
  bool boundary_totally_geodesic = false;

  const WeightedSpace& space() const { return problem.space; }

  std::optional<double> expect(std::string_view quantity) const {
    for (const auto& e : expected) {
      if (e.quantity == quantity) return e.value;
    }
    return std::nullopt;
  }
};

namespace zoo_detail {

inline std::string num(double v) {
  std::string s = format_double(v);
  return v < 0 ? "(" + s + ")" : s;
}

inline Patch patch(std::string label, std::vector<std::string> params, Box ranges,
                   const std::vector<std::string>& maps, int orientation = 1) {
  Patch p;
  p.label = std::move(label);
  p.params = std::move(params);
  p.ranges = std::move(ranges);
  for (const auto& m : maps) p.maps.push_back(parse(m, p.params));
  p.orientation = orientation;
  return p;
}

inline WeightedSpace planar(std::string label, std::string phi, Box chart) {
  WeightedSpace s;
  s.dim = 2;
  s.label = std::move(label);
  s.metric = euclidean_metric(2);
  s.weight = ScalarField::parse("0", 2);
  s.defining = ScalarField::parse(phi, 2);
  s.chart = std::move(chart);
  return s;
}

inline Patch polar_disk(double r0, double r1) {
  return patch("polar", {"r", "t"}, {{r0, r1}, {0.0, 2.0 * std::numbers::pi}}, {"r*cos(t)", "r*sin(t)"});
}

inline Patch circle(std::string label, double radius, int orientation) {
  const std::string r = num(radius);
  return patch(std::move(label), {"t"}, {{0.0, 2.0 * std::numbers::pi}}, {r + "*cos(t)", r + "*sin(t)"},
               orientation);
}

inline Problem half_plane(std::string label, std::string weight, double extent, bool cut) {
  Problem p;
  p.space = planar(std::move(label), "-y", {{-extent, extent}, {-extent, extent}});
  p.space.weight = ScalarField::parse(weight, 2);
  p.space.interior = {patch("upper", {"x", "y"}, {{-extent, extent}, {0.0, extent}}, {})};
  p.space.boundary = {patch("line", {"t"}, {{-extent, extent}}, {"t", "0"})};
  p.suite = planar_test_suite();
  if (cut) {
    const double in = 0.0625 * extent, out = 0.9875 * extent;
    p.suite.cutoff.inner = {{-in, in}, {-in, in}};
    p.suite.cutoff.outer = {{-out, out}, {-out, out}};
    p.rule.interior = 96;
  }
  return p;
}

inline double param(const std::map<std::string, double>& given, const std::string& key, double fallback) {
  auto it = given.find(key);
  return it == given.end() ? fallback : it->second;
}

inline void require_known(const std::string& name, const std::map<std::string, double>& given,
                          const std::vector<std::string>& known) {
  for (const auto& [k, v] : given) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw std::invalid_argument("unknown parameter '" + k + "' for zoo entry " + name);
    }
    if (!std::isfinite(v)) throw std::invalid_argument("parameter '" + k + "' must be finite");
  }
}

inline void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw std::invalid_argument("parameter " + key + " must be > 0, got " + format_double(v));
}

}  // namespace zoo_detail

inline std::vector<std::string> zoo_names() {
  return {"half_space", "gaussian_half_space", "ball", "annulus", "hemisphere", "poincare_cap", "ball3"};
}

/// Builds a zoo entry without the registration check.
inline ZooEntry build_zoo_entry(const std::string& name, const std::map<std::string, double>& given = {}) {
  using namespace zoo_detail;
  using std::numbers::pi;
  ZooEntry e;
  e.name = name;
  if (name == "half_space") {
    require_known(name, given, {});
    e.problem = half_plane("half_space", "0", 4.0, true);
    e.expected = {{"K_interior", 0.0, "flat metric, constant weight"},
                  {"lambda_min_II", 0.0, "straight boundary line"},
                  {"trace_II", 0.0, "straight boundary line"}};
    e.interior_flat = e.boundary_minimal = e.boundary_totally_geodesic = true;
  } else if (name == "gaussian_half_space") {
    require_known(name, given, {});
    e.problem = half_plane("gaussian_half_space", "(x^2 + y^2)/2", 8.0, false);
    e.expected = {{"K_interior", 1.0, "Hess V is the identity"},
                  {"lambda_min_II", 0.0, "straight boundary line"},
                  {"trace_II", 0.0, "straight boundary line"}};
    e.boundary_minimal = e.boundary_totally_geodesic = true;
  } else if (name == "ball") {
    require_known(name, given, {"R"});
    const double R = param(given, "R", 1.0);
    require_positive("R", R);
    e.params = {{"R", R}};
    Problem& p = e.problem;
    p.space = planar("ball(R=" + format_double(R) + ")", "x^2 + y^2 - " + num(R * R),
                     {{-1.5 * R, 1.5 * R}, {-1.5 * R, 1.5 * R}});
    p.space.interior = {polar_disk(0.0, R)};
    p.space.boundary = {circle("circle", R, 1)};
    p.suite = planar_test_suite();
    p.suite.cutoff.regularization = 1.0 / (R * R);
    e.expected = {{"K_interior", 0.0, "flat metric, constant weight"},
                  {"lambda_min_II", 1.0 / R, "curvature of a circle of radius R"},
                  {"trace_II", 1.0 / R, "curvature of a circle of radius R"}};
    e.interior_flat = true;
  } else if (name == "annulus") {
    require_known(name, given, {"r", "R"});
    const double r = param(given, "r", 0.5), R = param(given, "R", 1.0);
    require_positive("r", r);
    require_positive("R", R);
    if (!(r < R)) throw std::invalid_argument("annulus needs r < R");
    e.params = {{"r", r}, {"R", R}};
    Problem& p = e.problem;
    p.space = planar("annulus(r=" + format_double(r) + ", R=" + format_double(R) + ")",
                     "(x^2 + y^2 - " + num(r * r) + ")*(x^2 + y^2 - " + num(R * R) + ")",
                     {{-1.5 * R, 1.5 * R}, {-1.5 * R, 1.5 * R}});
    p.space.interior = {polar_disk(r, R)};
    p.space.boundary = {circle("inner circle", r, -1), circle("outer circle", R, 1)};
    p.suite = planar_test_suite();
    const double depth = 0.25 * (R * R - r * r) * (R * R - r * r);
    p.suite.cutoff.regularization = 1.0 / (depth * R * R);
    e.expected = {{"K_interior", 0.0, "flat metric, constant weight"},
                  {"lambda_min_II", -1.0 / r, "inner circle seen from outside, curvature -1/r"},
                  {"lambda_max_II", 1.0 / R, "outer circle, curvature 1/R"}};
    e.interior_flat = true;
  } else if (name == "hemisphere") {
    require_known(name, given, {"r"});
    const double r = param(given, "r", 1.0);
    require_positive("r", r);
    e.params = {{"r", r}};
    Problem& p = e.problem;
    WeightedSpace& s = p.space;
    s.dim = 2;
    s.label = "hemisphere(r=" + format_double(r) + ")";
    s.metric = {ScalarField::parse(num(r * r), 2), ScalarField::parse("0", 2),
                ScalarField::parse(num(r * r) + "*sin(x)^2", 2)};
    s.weight = ScalarField::parse("0", 2);
    s.defining = ScalarField::parse("x - pi/2", 2);
    s.chart = {{0.0, pi}, {0.0, 2.0 * pi}};
    s.interior = {patch("cap", {"x", "y"}, {{0.0, pi / 2}, {0.0, 2.0 * pi}}, {})};
    s.boundary = {patch("equator", {"t"}, {{0.0, 2.0 * pi}}, {"pi/2", "t"})};
    p.suite.fields = planar_test_fields();
    p.suite.neumann_bases =
        parse_fields({"cos(y)", "sin(y)", "x*cos(y)", "x^2 + sin(2*y)", "cos(x)*sin(y) + x"}, 2);
    p.suite.weights = parse_fields({"1", "cos(y)", "1 + 0.5*sin(y)", "x", "cos(x) + sin(2*y)"}, 2);
    p.suite.cutoff.inner = {{1.3, pi}, {0.0, 2.0 * pi}};
    p.suite.cutoff.outer = {{0.05, pi}, {0.0, 2.0 * pi}};
    e.expected = {{"K_interior", 1.0 / (r * r), "round sphere of radius r"},
                  {"lambda_min_II", 0.0, "the equator is a great circle"},
                  {"trace_II", 0.0, "the equator is a great circle"}};
    e.boundary_minimal = e.boundary_totally_geodesic = true;
  } else if (name == "poincare_cap") {
    require_known(name, given, {"rho"});
    const double rho = param(given, "rho", 0.7);
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("poincare_cap needs 0 < rho < 1");
    e.params = {{"rho", rho}};
    Problem& p = e.problem;
    const double edge = 0.5 * (1.0 + rho);
    p.space = planar("poincare_cap(rho=" + format_double(rho) + ")", "x^2 + y^2 - " + num(rho * rho),
                     {{-edge, edge}, {-edge, edge}});
    const std::string conf = "4/(1 - x^2 - y^2)^2";
    p.space.metric = {ScalarField::parse(conf, 2), ScalarField::parse("0", 2), ScalarField::parse(conf, 2)};
    p.space.interior = {polar_disk(0.0, rho)};
    p.space.boundary = {circle("circle", rho, 1)};
    p.suite = planar_test_suite();
    p.suite.cutoff.regularization = 1.0 / (rho * rho);
    const double kg = (1.0 + rho * rho) / (2.0 * rho);
    e.expected = {{"K_interior", -1.0, "hyperbolic plane"},
                  {"lambda_min_II", kg, "geodesic curvature (1 + rho^2)/(2 rho) of a Euclidean circle"},
                  {"trace_II", kg, "geodesic curvature (1 + rho^2)/(2 rho) of a Euclidean circle"}};
  } else if (name == "ball3") {
    require_known(name, given, {"R"});
    const double R = param(given, "R", 1.0);
    require_positive("R", R);
    e.params = {{"R", R}};
    Problem& p = e.problem;
    WeightedSpace& s = p.space;
    s.dim = 3;
    s.label = "ball3(R=" + format_double(R) + ")";
    s.metric = euclidean_metric(3);
    s.weight = ScalarField::parse("0", 3);
    s.defining = ScalarField::parse("x^2 + y^2 + z^2 - " + num(R * R), 3);
    s.chart = {{-1.5 * R, 1.5 * R}, {-1.5 * R, 1.5 * R}, {-1.5 * R, 1.5 * R}};
    s.interior = {patch("spherical", {"r", "a", "b"}, {{0.0, R}, {0.0, pi}, {0.0, 2.0 * pi}},
                        {"r*sin(a)*cos(b)", "r*sin(a)*sin(b)", "r*cos(a)"})};
    const std::string rr = num(R);
    s.boundary = {patch("sphere", {"a", "b"}, {{0.0, pi}, {0.0, 2.0 * pi}},
                        {rr + "*sin(a)*cos(b)", rr + "*sin(a)*sin(b)", rr + "*cos(a)"}, 1)};
    p.suite = spatial_test_suite();
    p.suite.cutoff.regularization = 1.0 / (R * R);
    p.plan.interior = 8;
    p.plan.boundary = 16;
    p.rule = {16, 24};
    e.expected = {{"K_interior", 0.0, "flat metric, constant weight"},
                  {"lambda_min_II", 1.0 / R, "sphere of radius R"},
                  {"trace_II", 2.0 / R, "sphere of radius R"}};
    e.interior_flat = true;
  } else {
    throw std::invalid_argument("unknown zoo entry '" + name + "'");
  }
  return e;
}

/// Builds the entry and confirms the Bochner identity on it before handing it out.
inline ZooEntry load_zoo(const std::string& name, const std::map<std::string, double>& params = {}) {
  ZooEntry e = build_zoo_entry(name, params);
  validate_space(e.problem.space);
  Problem quick = e.problem;
  quick.plan.random = 10;
  const CheckResult r = run_bochner(quick);
  if (!r.pass) {
    throw GeometryError("zoo entry " + name + " fails the Bochner identity (residual " + format_double(r.residual) +
                        " at " + r.witness + ")");
  }
  return e;
}

/// Parses "name" or "name,k=v,k=v".
inline ZooEntry load_zoo_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : spec) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  parts.push_back(cur);
  std::map<std::string, double> params;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("zoo parameter '" + parts[i] + "' is not of the form key=value");
    }
    const std::string key = parts[i].substr(0, eq);
    const std::string val = parts[i].substr(eq + 1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || end != val.data() + val.size()) {
      throw std::invalid_argument("zoo parameter " + key + " has non-numeric value '" + val + "'");
    }
    if (!params.emplace(key, v).second) throw std::invalid_argument("zoo parameter " + key + " given twice");
  }
  return load_zoo(parts[0], params);
}

}  // namespace gamma2
