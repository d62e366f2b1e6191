#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "gamma2/expr.hpp"
#include "gamma2/field.hpp"

namespace gamma2 {

/// Parametrization of a piece of the domain (dimension n) or of its boundary
/// (dimension n-1) by a parameter box.
struct Patch {
  std::string label;
  std::vector<std::string> params;
  Box ranges;
  /// One expression per chart coordinate, in the parameter variables. Empty
  /// means the identity map (the parameters are the chart coordinates).
  std::vector<Expr> maps;
  /// Sign of det[N, d_1 X, ..., d_{n-1} X] for boundary patches.
  int orientation = 1;

  int param_dim() const { return static_cast<int>(ranges.size()); }

  struct Image {
    Point x;
    /// jacobian[i][a] = d x_i / d u_a
    std::array<std::array<double, kMaxDim>, kMaxDim> jacobian{};
  };

  Image map(std::span<const double> u, int chart_dim) const {
    Image img;
    const int m = param_dim();
    if (maps.empty()) {
      img.x = Point(u);
      for (int i = 0; i < m; ++i) img.jacobian[i][i] = 1.0;
      return img;
    }
    std::array<Jet, kMaxDim> vars;
    for (int a = 0; a < m; ++a) vars[a] = Jet::variable(m, a, u[a], 1);
    std::array<double, kMaxDim> coords{};
    for (int i = 0; i < chart_dim; ++i) {
      const Jet xi = maps[i].evaluate(std::span<const Jet>(vars.data(), m));
      coords[i] = xi.value();
      for (int a = 0; a < m; ++a) img.jacobian[i][a] = xi[1 + a];
    }
    img.x = Point(std::span<const double>(coords.data(), chart_dim));
    return img;
  }

  std::string describe() const {
    std::string s = label.empty() ? std::string("patch") : label;
    s += " [";
    for (int a = 0; a < param_dim(); ++a) {
      if (a) s += ", ";
      s += (params.size() > static_cast<std::size_t>(a) ? params[a] : "u") + " in " +
           format_double(ranges[a].lo) + ".." + format_double(ranges[a].hi);
    }
    s += "]";
    if (!maps.empty()) {
      s += " -> (";
      for (std::size_t i = 0; i < maps.size(); ++i) {
        if (i) s += ", ";
        s += maps[i].to_string();
      }
      s += ")";
    }
    return s;
  }
};

/// A weighted Riemannian chart (g, e^{-V} dVol_g) with a domain {phi < 0}.
struct WeightedSpace {
  int dim = 2;
  /// Packed upper triangle g_ij, i <= j, row-major.
  std::vector<ScalarField> metric;
  ScalarField weight;
  ScalarField defining;
  Box chart;
  std::vector<Patch> interior;
  std::vector<Patch> boundary;
  std::string label;

  static int packed_index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  }

  const ScalarField& g(int i, int j) const { return metric[packed_index(i, j, dim)]; }
};

inline std::vector<ScalarField> euclidean_metric(int dim) {
  std::vector<ScalarField> m;
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) m.push_back(ScalarField::constant(dim, i == j ? 1.0 : 0.0));
  }
  return m;
}

}  // namespace gamma2
