#pragma once

/// \file
/// A Problem bundles a weighted space with the test families, sample plan and
/// quadrature rule used to exercise it, and runs every check on it.

#include <string>
#include <vector>

#include "gamma2/boundary.hpp"
#include "gamma2/verify.hpp"

namespace gamma2 {

struct TestSuite {
  /// Pointwise fields for the Bochner and dimension checks.
  std::vector<ScalarField> fields;
  /// Base fields w of the Neumann family.
  std::vector<ScalarField> neumann_bases;
  /// Test weights h, paired with the Neumann family by index.
  std::vector<ScalarField> weights;
  CutoffSpec cutoff;
};

struct Problem {
  WeightedSpace space;
  TestSuite suite;
  SamplePlan plan;
  QuadratureRule rule;
};

inline std::vector<ScalarField> parse_fields(const std::vector<std::string>& src, int dim) {
  std::vector<ScalarField> out;
  for (const auto& s : src) out.push_back(ScalarField::parse(s, dim));
  return out;
}

inline std::vector<ScalarField> planar_test_fields() {
  return parse_fields({"x^2 + 3*x*y", "sin(x)*cos(y)", "exp(0.3*x - 0.2*y)", "x^3 - y^3 + x*y", "log(2 + x^2 + y^2)",
                    "tanh(x + 2*y)", "sqrt(1 + x^2 + y^2)", "pow(1.5 + x^2, 0.7)*y", "cos(x*y) + x",
                    "(x - y)^4/(3 + y^2)"},
                   2);
}

inline std::vector<ScalarField> spatial_test_fields() {
  return parse_fields({"x^2 + 3*x*y - z^2", "sin(x)*cos(y)*exp(0.2*z)", "exp(0.3*x - 0.2*y + 0.1*z)",
                    "x^3 - y^3 + x*y*z", "log(2 + x^2 + y^2 + z^2)", "tanh(x + 2*y - z)", "sqrt(1 + x^2 + y^2 + z^2)",
                    "pow(1.5 + x^2, 0.7)*z", "cos(x*y) + z", "(x - z)^4/(3 + y^2)"},
                   3);
}

inline TestSuite planar_test_suite() {
  TestSuite t;
  t.fields = planar_test_fields();
  t.neumann_bases = parse_fields({"x", "y", "x*y", "x^2 - 0.5*y", "sin(x + y)"}, 2);
  t.weights = parse_fields({"1", "exp(-x^2 - y^2)", "1 + 0.5*x", "cos(y)", "x^2 + y"}, 2);
  return t;
}

inline TestSuite spatial_test_suite() {
  TestSuite t;
  t.fields = spatial_test_fields();
  t.neumann_bases = parse_fields({"x", "y*z", "x^2 - 0.5*z", "sin(x + y - z)", "x*y"}, 3);
  t.weights = parse_fields({"1", "exp(-x^2 - y^2 - z^2)", "1 + 0.5*z", "cos(y)", "x^2 + z"}, 3);
  return t;
}

/// Checks a space before use: boundary patches lie on {phi = 0} with a
/// nonvanishing normal and the declared orientation, interior patches lie in
/// {phi <= 0}, and the metric is positive definite at the sample points.
inline void validate_space(const WeightedSpace& s, int per_axis = 5) {
  if (s.dim < 1 || s.dim > kMaxDim) throw GeometryError("dimension must be between 1 and 4");
  if (static_cast<int>(s.metric.size()) != s.dim * (s.dim + 1) / 2) {
    throw GeometryError("metric needs " + std::to_string(s.dim * (s.dim + 1) / 2) + " components");
  }
  if (static_cast<int>(s.chart.size()) != s.dim) throw GeometryError("chart box needs one interval per axis");
  for (const Patch& p : s.interior) {
    detail::for_each_midpoint(p.ranges, per_axis, [&](std::span<const double> u) {
      const Point x = p.map(u, s.dim).x;
      const double phi = s.defining.value(x);
      if (phi > 1e-8) {
        throw GeometryError("interior patch " + p.label + " leaves the domain at " + x.to_string() +
                            " (phi = " + format_double(phi) + ")");
      }
      require_spd(metric_jets(s, x, 0).values(), x);
    });
  }
  for (const Patch& p : s.boundary) {
    detail::for_each_midpoint(p.ranges, per_axis, [&](std::span<const double> u) {
      const Patch::Image img = p.map(u, s.dim);
      const Point& x = img.x;
      const Jet phi = s.defining(x, 1);
      if (!(std::abs(phi.value()) <= 1e-8)) {
        throw GeometryError("boundary patch " + p.label + " leaves {phi = 0} at " + x.to_string() +
                            " (phi = " + format_double(phi.value()) + ")");
      }
      const MetricJets m = metric_jets(s, x, 0);
      const Matrix g = m.values();
      require_spd(g, x);
      Vector dphi(s.dim);
      for (int i = 0; i < s.dim; ++i) dphi(i) = phi[1 + i];
      const Vector up = g.inverse() * dphi;
      const double norm = std::sqrt(dphi.dot(up));
      if (!(norm >= kNormalFloor)) throw GeometryError("grad phi vanishes on the boundary at " + x.to_string());
      Matrix frame(s.dim, s.dim);
      frame.col(0) = up / norm;
      for (int a = 0; a + 1 < s.dim; ++a) {
        for (int i = 0; i < s.dim; ++i) frame(i, a + 1) = img.jacobian[i][a];
      }
      const double det = frame.determinant();
      const int sign = det > 0 ? 1 : -1;
      if (std::abs(det) < 1e-12) throw GeometryError("degenerate boundary parametrization at " + x.to_string());
      if (sign != p.orientation) {
        throw GeometryError("boundary patch " + p.label + " declares orientation " + std::to_string(p.orientation) +
                            " but the outward normal gives " + std::to_string(sign) + " at " + x.to_string());
      }
    });
  }
}

inline ScalarField cutoff_field(const Problem& p) {
  if (p.suite.cutoff.has_box()) return plateau_cutoff(p.space.dim, p.suite.cutoff.inner, p.suite.cutoff.outer);
  return ScalarField::constant(p.space.dim, 1.0);
}

inline std::vector<NeumannTestFunction> neumann_family(const Problem& p) {
  std::vector<NeumannTestFunction> out;
  for (const auto& w : p.suite.neumann_bases) out.push_back(make_neumann(p.space, w, p.suite.cutoff));
  return out;
}

/// Multiplies by the cutoff when there is one.
inline ScalarField localized(const Problem& p, const ScalarField& f) {
  if (!p.suite.cutoff.has_box()) return f;
  const ScalarField chi = cutoff_field(p);
  return (chi * f).with_label("chi*(" + f.label() + ")");
}

inline std::size_t pair_count(const Problem& p) {
  const std::size_t n = std::min(p.suite.neumann_bases.size(), p.suite.weights.size());
  if (n == 0) throw std::invalid_argument("test suite needs Neumann bases and weights");
  return n;
}

inline std::vector<Point> bochner_points(const Problem& p) {
  return random_interior_points(p.space, p.plan.random, p.plan.seed);
}

inline CheckResult run_bochner(const Problem& p) {
  const auto pts = bochner_points(p);
  return check_bochner(p.space, p.suite.fields, pts);
}

inline CheckResult run_dimension(const Problem& p, double n_dim) {
  const auto pts = bochner_points(p);
  return check_dimension_term(p.space, p.suite.fields, pts, n_dim);
}

/// Green's formula on (chi h_k, chi w_k); the raw fields do not satisfy the
/// Neumann condition, so the boundary term is exercised.
inline CheckResult run_green(const Problem& p) {
  std::vector<CheckResult> parts;
  for (std::size_t k = 0; k < pair_count(p); ++k) {
    parts.push_back(check_green(p.space, localized(p, p.suite.weights[k]), localized(p, p.suite.neumann_bases[k]),
                                p.rule));
  }
  return aggregate("green", std::move(parts));
}

/// Index of the pair whose raw base field is used as the non-Neumann case.
inline std::size_t raw_pair_index(const Problem& p) { return std::min<std::size_t>(3, pair_count(p) - 1); }

/// Measure Laplacian of each Neumann function against its weight, plus one
/// raw base field whose boundary part is nonzero.
inline CheckResult run_laplacian(const Problem& p) {
  const auto family = neumann_family(p);
  std::vector<CheckResult> parts;
  for (std::size_t k = 0; k < pair_count(p); ++k) {
    parts.push_back(check_mv_laplacian(p.space, family[k], p.suite.weights[k], true, p.rule));
  }
  const std::size_t k = raw_pair_index(p);
  parts.push_back(
      check_mv_laplacian(p.space, localized(p, p.suite.neumann_bases[k]), p.suite.weights[k], false, p.rule));
  return aggregate("mv_laplacian", std::move(parts));
}

inline CheckResult run_theorem(const Problem& p) {
  const auto family = neumann_family(p);
  std::vector<CheckResult> parts;
  for (std::size_t k = 0; k < pair_count(p); ++k) {
    parts.push_back(check_ricci_decomposition(p.space, family[k], p.suite.weights[k], p.rule));
  }
  return aggregate("ricci_decomposition", std::move(parts));
}

inline CheckResult run_ii(const Problem& p) {
  const auto family = neumann_family(p);
  const auto pts = boundary_samples(p.space, p.plan.boundary);
  std::vector<CheckResult> parts;
  for (const auto& g : family) parts.push_back(check_ii_identity(p.space, g, pts));
  return aggregate("ii_identity", std::move(parts));
}

inline CurvatureReport run_certify(const Problem& p, std::span<const double> K, std::span<const double> N) {
  return certify(p.space, K, N, p.plan);
}

inline CheckResult run_flatness(const Problem& p) { return flatness_report(p.space, p.plan); }

inline std::string describe(const Problem& p) {
  const WeightedSpace& s = p.space;
  std::string out;
  out += "space: " + s.label + "\n";
  out += "dim: " + std::to_string(s.dim) + "\n";
  for (int i = 0; i < s.dim; ++i) {
    for (int j = i; j < s.dim; ++j) {
      out += "g" + std::to_string(i + 1) + std::to_string(j + 1) + " = " + s.g(i, j).label() + "\n";
    }
  }
  out += "V = " + s.weight.label() + "\n";
  out += "phi = " + s.defining.label() + "\n";
  out += "chart:";
  for (const auto& iv : s.chart) out += " [" + format_double(iv.lo) + ", " + format_double(iv.hi) + "]";
  out += "\n";
  for (const auto& patch : s.interior) out += "interior patch: " + patch.describe() + "\n";
  for (const auto& patch : s.boundary) out += "boundary patch: " + patch.describe() + "\n";
  if (p.suite.cutoff.has_box()) out += "cutoff: " + cutoff_field(p).label() + "\n";
  if (p.suite.cutoff.regularization > 0.0) {
    out += "neumann regularization: " + format_double(p.suite.cutoff.regularization) + "\n";
  }
  out += "samples: interior " + std::to_string(p.plan.interior) + " per axis, boundary " +
         std::to_string(p.plan.boundary) + " per axis, random " + std::to_string(p.plan.random) + ", seed " +
         std::to_string(p.plan.seed) + "\n";
  out += "quadrature: interior " + std::to_string(p.rule.interior) + ", boundary " + std::to_string(p.rule.boundary) +
         " nodes per axis\n";
  return out;
}

}  // namespace gamma2
