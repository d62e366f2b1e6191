#pragma once

/// \file
/// Text, JSON and CSV serialization of check results and certificates.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gamma2/suite.hpp"

namespace gamma2 {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

inline Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const MetaValue& v) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return finite_or_null(x);
        } else {
          return Json(x);
        }
      },
      v);
}

inline Json to_json(const CheckResult& r) {
  Json j;
  j["name"] = r.name;
  j["pass"] = r.pass;
  j["residual"] = finite_or_null(r.residual);
  j["tolerance"] = r.tolerance;
  j["witness"] = r.witness;
  Json meta = Json::object();
  for (const auto& [k, v] : r.metadata) meta[k] = to_json(v);
  j["metadata"] = meta;
  Json parts = Json::array();
  for (const auto& p : r.parts) parts.push_back(to_json(p));
  j["parts"] = parts;
  return j;
}

inline Json point_json(const Point& x) {
  Json a = Json::array();
  for (int i = 0; i < x.dim(); ++i) a.push_back(x[i]);
  return a;
}

inline Json to_json(const CurvatureReport& r) {
  Json j;
  j["label"] = r.label;
  j["dim"] = r.dim;
  j["K_interior"] = finite_or_null(r.K_interior);
  j["K_interior_witness"] = point_json(r.K_witness);
  j["lambda_min_II"] = finite_or_null(r.lambda_min_II);
  j["lambda_min_II_witness"] = point_json(r.lambda_min_II_witness);
  j["lambda_max_II"] = finite_or_null(r.lambda_max_II);
  j["trace_II_min"] = finite_or_null(r.trace_II_min);
  j["trace_II_max"] = finite_or_null(r.trace_II_max);
  j["boundary_convex"] = r.convex();
  j["max_weight_gradient"] = r.max_weight_gradient;
  Json inf = Json::array();
  for (const auto& v : r.rcd_infinity) inf.push_back({{"K", v.K}, {"holds", v.holds}});
  j["rcd_infinity"] = inf;
  Json star = Json::array();
  for (const auto& v : r.rcd_star) star.push_back({{"K", v.K}, {"N", v.N}, {"holds", v.holds}});
  j["rcd_star"] = star;
  j["samples"] = {{"interior_grid_per_axis", r.plan.interior},
                  {"boundary_grid_per_axis", r.plan.boundary},
                  {"interior_points", r.interior.size()},
                  {"boundary_points", r.boundary.size()}};
  return j;
}

inline Json patch_json(const Patch& p) {
  Json j;
  j["label"] = p.label;
  j["params"] = p.params;
  Json ranges = Json::array();
  for (const auto& r : p.ranges) ranges.push_back({r.lo, r.hi});
  j["ranges"] = ranges;
  Json maps = Json::array();
  for (const auto& m : p.maps) maps.push_back(m.to_string());
  j["maps"] = maps;
  j["orientation"] = p.orientation;
  return j;
}

inline Json to_json(const Problem& p) {
  const WeightedSpace& s = p.space;
  Json j;
  j["label"] = s.label;
  j["dim"] = s.dim;
  Json metric = Json::object();
  for (int i = 0; i < s.dim; ++i) {
    for (int k = i; k < s.dim; ++k) metric["g" + std::to_string(i + 1) + std::to_string(k + 1)] = s.g(i, k).label();
  }
  j["metric"] = metric;
  j["V"] = s.weight.label();
  j["phi"] = s.defining.label();
  Json chart = Json::array();
  for (const auto& iv : s.chart) chart.push_back({iv.lo, iv.hi});
  j["chart"] = chart;
  Json interior = Json::array();
  for (const auto& patch : s.interior) interior.push_back(patch_json(patch));
  j["interior_patches"] = interior;
  Json boundary = Json::array();
  for (const auto& patch : s.boundary) boundary.push_back(patch_json(patch));
  j["boundary_patches"] = boundary;
  Json cutoff;
  cutoff["box"] = p.suite.cutoff.has_box() ? Json(cutoff_field(p).label()) : Json(nullptr);
  cutoff["regularization"] = p.suite.cutoff.regularization;
  j["cutoff"] = cutoff;
  auto labels = [](const std::vector<ScalarField>& v) {
    Json a = Json::array();
    for (const auto& f : v) a.push_back(f.label());
    return a;
  };
  j["tests"] = {{"fields", labels(p.suite.fields)},
                {"neumann", labels(p.suite.neumann_bases)},
                {"weights", labels(p.suite.weights)}};
  j["samples"] = {{"interior", p.plan.interior},
                  {"boundary", p.plan.boundary},
                  {"random", p.plan.random},
                  {"seed", p.plan.seed}};
  j["quadrature"] = {{"interior", p.rule.interior}, {"boundary", p.rule.boundary}};
  return j;
}

// ---------------------------------------------------------------------------
// Text

inline std::string meta_text(const MetaValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else {
          return std::to_string(x);
        }
      },
      v);
}

inline void append_text(std::string& out, const CheckResult& r, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  out += pad + r.name + ": " + (r.pass ? "PASS" : "FAIL") + "  residual " + format_double(r.residual) +
         " (tolerance " + format_double(r.tolerance) + ")\n";
  if (!r.witness.empty()) out += pad + "  worst case: " + r.witness + "\n";
  for (const auto& [k, v] : r.metadata) out += pad + "  " + k + ": " + meta_text(v) + "\n";
  for (const auto& p : r.parts) append_text(out, p, indent + 4);
}

inline std::string to_text(const CheckResult& r) {
  std::string out;
  append_text(out, r, 0);
  return out;
}

inline std::string to_text(const CurvatureReport& r) {
  std::string out;
  out += "curvature report (" + r.label + ")\n";
  out += "  samples: " + std::to_string(r.interior.size()) + " interior points (grid " + std::to_string(r.plan.interior) +
         " per axis), " + std::to_string(r.boundary.size()) + " boundary points (grid " +
         std::to_string(r.plan.boundary) + " per axis)\n";
  out += "  K_interior: " + format_double(r.K_interior) + " at " + r.K_witness.to_string() + "\n";
  if (!r.boundary.empty()) {
    out += "  lambda_min_II: " + format_double(r.lambda_min_II) + " at " + r.lambda_min_II_witness.to_string() + "\n";
    out += "  lambda_max_II: " + format_double(r.lambda_max_II) + "\n";
    out += "  trace_II range: [" + format_double(r.trace_II_min) + ", " + format_double(r.trace_II_max) + "]\n";
  }
  out += std::string("  boundary convex: ") + (r.convex() ? "yes" : "no") + "\n";
  out += "  max |grad V|: " + format_double(r.max_weight_gradient) + "\n";
  for (const auto& v : r.rcd_infinity) {
    out += "  RCD(" + format_double(v.K) + ", inf): " + (v.holds ? "true" : "false") + "\n";
  }
  for (const auto& v : r.rcd_star) {
    out += "  RCD*(" + format_double(v.K) + ", " + format_double(v.N) + "): " + (v.holds ? "true" : "false") + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Full report

struct FullReport {
  Problem problem;
  std::vector<CheckResult> checks;
  CurvatureReport certificate;
  std::vector<std::pair<std::string, double>> timing_seconds;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Runs every check on the problem, then the certifier with the given K and N lists.
inline FullReport run_full_report(const Problem& p, std::span<const double> K, std::span<const double> N) {
  FullReport rep;
  rep.problem = p;
  auto timed = [&](const std::string& name, const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    rep.timing_seconds.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  timed("bochner", [&] { rep.checks.push_back(run_bochner(p)); });
  timed("green", [&] { rep.checks.push_back(run_green(p)); });
  timed("mv_laplacian", [&] { rep.checks.push_back(run_laplacian(p)); });
  timed("ricci_decomposition", [&] { rep.checks.push_back(run_theorem(p)); });
  timed("ii_identity", [&] { rep.checks.push_back(run_ii(p)); });
  timed("dimension_term", [&] { rep.checks.push_back(run_dimension(p, p.space.dim)); });
  timed("flatness", [&] { rep.checks.push_back(run_flatness(p)); });
  timed("certify", [&] { rep.certificate = run_certify(p, K, N); });
  return rep;
}

inline Json to_json(const FullReport& r, bool timing) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["space"] = to_json(r.problem);
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  j["certificate"] = to_json(r.certificate);
  j["all_checks_pass"] = r.all_pass();
  if (timing) {
    Json t = Json::object();
    for (const auto& [k, v] : r.timing_seconds) t[k] = v;
    j["timing_seconds"] = t;
  }
  return j;
}

inline std::string to_text(const FullReport& r, bool timing) {
  std::string out = describe(r.problem);
  out += "\n";
  for (const auto& c : r.checks) out += to_text(c);
  out += "\n" + to_text(r.certificate);
  out += std::string("\nall checks pass: ") + (r.all_pass() ? "yes" : "no") + "\n";
  if (timing) {
    out += "timing (seconds):\n";
    for (const auto& [k, v] : r.timing_seconds) out += "  " + k + ": " + format_double(v) + "\n";
  }
  return out;
}

/// One row per sample point (curvature eigenvalues) followed by one row per
/// check result, including the parts of aggregated checks.
inline std::string to_csv(const FullReport& r) {
  const int n = r.problem.space.dim;
  std::string out = "kind,name";
  for (int i = 0; i < n; ++i) out += ",x" + std::to_string(i + 1);
  out += ",lambda_min,lambda_max,trace_II,residual,tolerance,pass\n";
  auto coords = [&](const Point& x) {
    std::string s;
    for (int i = 0; i < n; ++i) s += "," + format_double(x[i]);
    return s;
  };
  const std::string blank_coords(static_cast<std::size_t>(n), ',');
  for (const auto& s : r.certificate.interior) {
    out += "interior_sample,ricci_v" + coords(s.x) + "," + format_double(s.lambda_min) + "," +
           format_double(s.lambda_max) + ",,,,\n";
  }
  for (const auto& s : r.certificate.boundary) {
    out += "boundary_sample,second_fundamental_form" + coords(s.x) + "," + format_double(s.lambda_min) + "," +
           format_double(s.lambda_max) + "," + format_double(s.trace) + ",,,\n";
  }
  std::function<void(const CheckResult&, const std::string&)> row = [&](const CheckResult& c, const std::string& name) {
    out += "check," + name + blank_coords + ",,,," + format_double(c.residual) + "," + format_double(c.tolerance) + "," +
           (c.pass ? "true" : "false") + "\n";
    for (std::size_t k = 0; k < c.parts.size(); ++k) row(c.parts[k], name + "/" + std::to_string(k + 1));
  };
  for (const auto& c : r.checks) row(c, c.name);
  return out;
}

}  // namespace gamma2
