#pragma once

/// \file
/// Boundary geometry of {phi < 0} and the Neumann test-function factory.
///
/// The outward unit normal is N = grad phi / |grad phi|_g, extended off the
/// boundary by the same formula so it can be differentiated. The second
/// fundamental form is II(X, Y) = g(nabla_X N, Y) on tangent vectors, so the
/// unit disk has II = +1.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gamma2/errors.hpp"
#include "gamma2/field.hpp"
#include "gamma2/geometry.hpp"
#include "gamma2/space.hpp"

namespace gamma2 {

inline constexpr double kBoundaryTolerance = 1e-10;
inline constexpr double kNormalFloor = 1e-8;

struct BoundaryFrame {
  Point point;
  Vector normal;
  std::vector<Vector> tangents;
  /// |grad phi|_g at the point.
  double grad_norm = 0.0;

  /// g-orthonormal tangent components of a contravariant vector.
  Vector tangent_components(const Vector& v, const Matrix& g) const {
    Vector c(static_cast<int>(tangents.size()));
    for (std::size_t a = 0; a < tangents.size(); ++a) c(a) = tangents[a].dot(g * v);
    return c;
  }
};

namespace detail {

inline void require_on_boundary(double phi, const Point& x, double tol) {
  if (!(std::abs(phi) <= tol)) {
    throw GeometryError("point " + x.to_string() + " is not on the boundary: phi = " + format_double(phi));
  }
}

inline BoundaryFrame make_frame(const LocalGeometry& geo, const Jet& phi, std::span<const int> axis_order) {
  const int n = geo.dim();
  const Matrix g = geo.metric().values();
  const Vector grad = geo.gradient(phi);
  const double norm = std::sqrt(grad.dot(g * grad));
  if (!(norm >= kNormalFloor)) {
    throw GeometryError("degenerate defining function at " + geo.point().to_string() +
                        ": |grad phi|_g = " + format_double(norm));
  }
  BoundaryFrame f;
  f.point = geo.point();
  f.grad_norm = norm;
  f.normal = grad / norm;

  std::vector<Vector> basis{f.normal};
  for (int s = 0; s < n && static_cast<int>(basis.size()) < n; ++s) {
    const int axis = axis_order.empty() ? s : axis_order[s];
    Vector v = Vector::Zero(n);
    v(axis) = 1.0;
    for (const Vector& b : basis) v -= b.dot(g * v) * b;
    const double len = std::sqrt(v.dot(g * v));
    if (len < 1e-10) continue;
    v /= len;
    // second pass keeps orthogonality at roundoff level
    for (const Vector& b : basis) v -= b.dot(g * v) * b;
    v /= std::sqrt(v.dot(g * v));
    basis.push_back(v);
    f.tangents.push_back(v);
  }
  if (static_cast<int>(f.tangents.size()) != n - 1) {
    throw GeometryError("could not complete a tangent frame at " + geo.point().to_string());
  }
  return f;
}

}  // namespace detail

/// Outward normal and g-orthonormal tangent frame at a boundary point.
/// Gram-Schmidt is seeded by the chart axes in axis_order (default 0..n-1).
inline BoundaryFrame boundary_frame(const WeightedSpace& space, const Point& x,
                                    std::span<const int> axis_order = {},
                                    double tolerance = kBoundaryTolerance) {
  const Jet phi = space.defining(x, 1);
  detail::require_on_boundary(phi.value(), x, tolerance);
  return detail::make_frame(LocalGeometry(space, x, 2), phi, axis_order);
}

struct SecondFundamentalForm {
  BoundaryFrame frame;
  /// II_ab = g(nabla_{e_a} N, e_b) in the tangent frame.
  Matrix matrix;

  double trace() const { return matrix.trace(); }

  Vector eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  }

  /// II(v_T, v_T) for the tangential part of a contravariant vector v.
  double operator()(const Vector& v, const Matrix& g) const {
    const Vector c = frame.tangent_components(v, g);
    return c.dot(matrix * c);
  }
};

/// II from an already-built local geometry (order >= 2) and phi's jet (order >= 2).
inline SecondFundamentalForm second_fundamental_form(const LocalGeometry& geo, const Jet& phi,
                                                     std::span<const int> axis_order = {}) {
  const int n = geo.dim();
  SecondFundamentalForm s;
  s.frame = detail::make_frame(geo, phi, axis_order);

  const auto& m = geo.metric();
  std::array<Jet, kMaxDim> dphi;
  for (int i = 0; i < n; ++i) dphi[i] = phi.partial(i);
  const Jet inv_norm = 1.0 / sqrt(m.contract(dphi, dphi));
  std::array<Jet, kMaxDim> normal;  // N^k as a field
  for (int k = 0; k < n; ++k) {
    Jet up = m.ginv[k][0] * dphi[0];
    for (int l = 1; l < n; ++l) up += m.ginv[k][l] * dphi[l];
    normal[k] = up * inv_norm;
  }
  // shape[k][i] = d_i N^k + Gamma^k_ij N^j, so (nabla_X N)^k = shape[k][i] X^i
  Matrix shape(n, n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      double v = normal[k][1 + i];
      for (int j = 0; j < n; ++j) v += geo.christoffel(k, i, j).value() * normal[j].value();
      shape(k, i) = v;
    }
  }
  const Matrix g = m.values();
  const int t = n - 1;
  Matrix ii(t, t);
  for (int a = 0; a < t; ++a) {
    const Vector sa = shape * s.frame.tangents[a];
    for (int b = 0; b < t; ++b) ii(a, b) = sa.dot(g * s.frame.tangents[b]);
  }
  s.matrix = (ii + ii.transpose()) * 0.5;
  return s;
}

inline SecondFundamentalForm second_fundamental_form(const WeightedSpace& space, const Point& x,
                                                     std::span<const int> axis_order = {},
                                                     double tolerance = kBoundaryTolerance) {
  const Jet phi = space.defining(x, kDefaultOrder);
  detail::require_on_boundary(phi.value(), x, tolerance);
  return second_fundamental_form(LocalGeometry(space, x), phi, axis_order);
}

inline double mean_curvature(const WeightedSpace& space, const Point& x) {
  return second_fundamental_form(space, x).trace();
}

/// g(N, grad f) at a boundary point.
inline double neumann_residual(const WeightedSpace& space, const ScalarField& f, const Point& x,
                               double tolerance = kBoundaryTolerance) {
  const Jet phi = space.defining(x, 1);
  detail::require_on_boundary(phi.value(), x, tolerance);
  const MetricJets m = metric_jets(space, x, 1);
  const double norm = std::sqrt(m.gamma(phi, phi).value());
  if (!(norm >= kNormalFloor)) {
    throw GeometryError("degenerate defining function at " + x.to_string());
  }
  return m.gamma(f(x, 1), phi).value() / norm;
}

// ---------------------------------------------------------------------------
// Cutoffs

inline constexpr double kStepSharpness = 6.0;

/// Smooth step from 0 at u = 0 to 1 at u = 1: (1 + erf(a (2u - 1))) / 2 with
/// a = 6, which is within 1.1e-17 of its limits at the ends. It is taken as
/// exactly 0 for u <= 0 and exactly 1 for u >= 1.
inline Jet smooth_step(const Jet& u) {
  const double v = u.value();
  if (v <= 0.0) return Jet::constant(u.dim(), 0.0, u.order());
  if (v >= 1.0) return Jet::constant(u.dim(), 1.0, u.order());
  return 0.5 + 0.5 * erf(kStepSharpness * (2.0 * u - 1.0));
}

inline double smooth_step(double v) {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  return 0.5 + 0.5 * std::erf(kStepSharpness * (2.0 * v - 1.0));
}

/// Inner and outer boxes of a plateau cutoff (1 on inner, 0 outside outer),
/// and the regularization c of the Neumann correction denominator
/// Gamma(phi, phi) + c phi^2. A positive c keeps the correction finite at
/// critical points of phi inside the domain.
struct CutoffSpec {
  Box inner;
  Box outer;
  double regularization = 0.0;

  bool has_box() const { return !outer.empty(); }
};

inline void validate_cutoff(const CutoffSpec& c, const WeightedSpace& space) {
  if (c.has_box()) {
    if (static_cast<int>(c.inner.size()) != space.dim || static_cast<int>(c.outer.size()) != space.dim) {
      throw std::invalid_argument("cutoff boxes must have one interval per chart axis");
    }
    for (int i = 0; i < space.dim; ++i) {
      const Interval& in = c.inner[i];
      const Interval& out = c.outer[i];
      if (!(out.lo <= in.lo && in.lo <= in.hi && in.hi <= out.hi)) {
        throw std::invalid_argument("cutoff inner box must lie inside the outer box");
      }
      if (!space.chart[i].contains(out)) {
        throw std::invalid_argument("cutoff support box exceeds the chart box on axis " + std::to_string(i));
      }
    }
  }
  if (!(c.regularization >= 0.0) || !std::isfinite(c.regularization)) {
    throw std::invalid_argument("Neumann regularization must be a finite number >= 0");
  }
}

/// Product plateau cutoff: 1 on the inner box, 0 outside the outer box. An
/// axis side where the inner and outer edges coincide is left uncut.
inline ScalarField plateau_cutoff(int dim, const Box& inner, const Box& outer) {
  std::string label = "plateau[";
  for (int i = 0; i < dim; ++i) {
    if (i) label += " x ";
    label += format_double(inner[i].lo) + "," + format_double(inner[i].hi) + "|" +
             format_double(outer[i].lo) + "," + format_double(outer[i].hi);
  }
  label += "]";
  return ScalarField(
      dim,
      [dim, inner, outer](const Point& x, int order) {
        const auto seeds = seed_point(x, order);
        Jet chi = Jet::constant(dim, 1.0, order);
        for (int i = 0; i < dim; ++i) {
          const Interval& in = inner[i];
          const Interval& out = outer[i];
          if ((in.lo > out.lo && x[i] <= out.lo) || (in.hi < out.hi && x[i] >= out.hi)) {
            return Jet::constant(dim, 0.0, order);
          }
          if (x[i] < in.lo) chi = chi * smooth_step((seeds[i] - out.lo) / (in.lo - out.lo));
          if (x[i] > in.hi) chi = chi * smooth_step((out.hi - seeds[i]) / (out.hi - in.hi));
        }
        return chi;
      },
      label);
}

struct NeumannTestFunction {
  ScalarField field;
  ScalarField base;
  CutoffSpec cutoff;

  const std::string& label() const { return field.label(); }
  operator const ScalarField&() const { return field; }
};

/// Builds chi * (w - phi * Gamma(phi, w) / (Gamma(phi, phi) + c phi^2)).
///
/// On {phi = 0} the gradient of the bracket is grad w - (Gamma(phi,w)/Gamma(phi,phi)) grad phi,
/// which is g-orthogonal to grad phi, so g(N, grad g) = 0 there exactly. The
/// correction consumes one derivative of phi and w, so those are evaluated one
/// order above the requested jet order.
inline NeumannTestFunction make_neumann(const WeightedSpace& space, const ScalarField& w,
                                        const CutoffSpec& cutoff) {
  validate_cutoff(cutoff, space);
  if (w.dim() != space.dim) throw std::invalid_argument("base field dimension does not match space");
  const int n = space.dim;
  std::optional<ScalarField> chi;
  if (cutoff.has_box()) chi = plateau_cutoff(n, cutoff.inner, cutoff.outer);
  const double c = cutoff.regularization;
  WeightedSpace metric_only;
  metric_only.dim = n;
  metric_only.metric = space.metric;
  const ScalarField phi_field = space.defining;

  std::string label = "neumann(" + w.label();
  if (chi) label += "; " + chi->label();
  if (c > 0.0) label += "; c=" + format_double(c);
  label += ")";

  auto fn = [w, chi, c, metric_only, phi_field](const Point& x, int order) {
    if (order + 1 > kMaxOrder) throw std::invalid_argument("Neumann test functions support order <= 3");
    Jet chi_x;
    if (chi) {
      chi_x = (*chi)(x, order);
      if (chi_x.is_zero()) return chi_x;
    }
    const Jet phi = phi_field(x, order + 1);
    const Jet wj = w(x, order + 1);
    const Jet phi_t = phi.truncated(order);
    const MetricJets m = metric_jets(metric_only, x, order);
    const Jet cross = m.gamma(phi, wj);
    Jet denom = m.gamma(phi, phi);
    if (c > 0.0) denom += c * phi_t * phi_t;
    if (!(denom.value() > 0.0)) {
      throw GeometryError("Neumann correction denominator vanishes at " + x.to_string() +
                          "; phi has a critical point there (use a positive regularization)");
    }
    Jet g = wj.truncated(order) - phi_t * (cross / denom);
    if (chi) g = chi_x * g;
    return g;
  };
  return {ScalarField(n, fn, label), w, cutoff};
}

}  // namespace gamma2
