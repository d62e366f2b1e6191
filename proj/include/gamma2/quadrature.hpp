#pragma once

/// \file
/// Tensor Gauss-Legendre integration against e^{-V} dVol_g on the domain and
/// e^{-V} dH^{n-1} on its boundary.
///
/// Interior integrals run over the space's interior patches when it has any,
/// otherwise over the chart box with nodes outside {phi < 0} dropped. The
/// clipped rule is only accurate for integrands that vanish near the boundary.

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "gamma2/errors.hpp"
#include "gamma2/geometry.hpp"
#include "gamma2/parallel.hpp"
#include "gamma2/space.hpp"

namespace gamma2 {

inline constexpr double kDensityFloor = 1e-12;

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// m-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_m.
inline GaussRule compute_gauss_legendre(int m) {
  if (m < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  GaussRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    r.weights[i] = w;
    r.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) r.nodes[m / 2] = 0.0;
  return r;
}

inline const GaussRule& gauss_legendre(int m) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gauss_legendre(m)).first;
  return it->second;
}

/// Per-axis node counts for the interior and boundary product rules.
struct QuadratureRule {
  int interior = 64;
  int boundary = 256;

  QuadratureRule doubled() const { return {2 * interior, 2 * boundary}; }
};

struct QuadNode {
  Point x;
  /// Product weight times Jacobian (or Gram) factor times e^{-V} sqrt(det g).
  double weight = 0.0;
  double sqrt_det = 0.0;
  int patch = -1;
};

namespace detail {

/// Calls fn(u, w) for every node of the m^d tensor rule on the box.
template <class Fn>
void for_each_tensor_node(const Box& box, int m, Fn&& fn) {
  const GaussRule& r = gauss_legendre(m);
  const int d = static_cast<int>(box.size());
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(m);
  std::array<double, kMaxDim> u{};
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double w = 1.0;
    for (int a = d - 1; a >= 0; --a) {
      const int k = static_cast<int>(rest % m);
      rest /= m;
      const double half = 0.5 * box[a].length();
      u[a] = box[a].lo + half * (r.nodes[k] + 1.0);
      w *= half * r.weights[k];
    }
    fn(std::span<const double>(u.data(), d), w);
  }
}

inline double weighted_density(const WeightedSpace& space, const Point& x, double* sqrt_det_out) {
  const MetricJets m = metric_jets(space, x, 0);
  const double sd = std::sqrt(m.values().determinant());
  if (sqrt_det_out) *sqrt_det_out = sd;
  return std::exp(-space.weight.value(x)) * sd;
}

}  // namespace detail

inline std::vector<QuadNode> interior_nodes(const WeightedSpace& space, int m) {
  std::vector<QuadNode> nodes;
  const int n = space.dim;
  if (space.interior.empty()) {
    detail::for_each_tensor_node(space.chart, m, [&](std::span<const double> u, double w) {
      Point x(u);
      if (!(space.defining.value(x) < 0.0)) return;
      nodes.push_back({x, w, 0.0, -1});
    });
  } else {
    for (std::size_t p = 0; p < space.interior.size(); ++p) {
      const Patch& patch = space.interior[p];
      if (patch.param_dim() != n) throw QuadratureError("interior patch must have " + std::to_string(n) + " parameters");
      detail::for_each_tensor_node(patch.ranges, m, [&](std::span<const double> u, double w) {
        const Patch::Image img = patch.map(u, n);
        Matrix j(n, n);
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < n; ++a) j(i, a) = img.jacobian[i][a];
        nodes.push_back({img.x, w * std::abs(j.determinant()), 0.0, static_cast<int>(p)});
      });
    }
  }
  parallel_for(nodes.size(), [&](std::size_t i) {
    double sd = 0.0;
    nodes[i].weight *= detail::weighted_density(space, nodes[i].x, &sd);
    nodes[i].sqrt_det = sd;
  });
  return nodes;
}

inline std::vector<QuadNode> boundary_nodes(const WeightedSpace& space, const Patch& patch, int m,
                                            int patch_index = 0) {
  const int n = space.dim;
  const int t = patch.param_dim();
  if (t != n - 1) throw QuadratureError("boundary patch must have " + std::to_string(n - 1) + " parameters");
  std::vector<QuadNode> nodes;
  std::vector<std::array<std::array<double, kMaxDim>, kMaxDim>> jac;
  detail::for_each_tensor_node(patch.ranges, m, [&](std::span<const double> u, double w) {
    const Patch::Image img = patch.map(u, n);
    nodes.push_back({img.x, w, 0.0, patch_index});
    jac.push_back(img.jacobian);
  });
  parallel_for(nodes.size(), [&](std::size_t k) {
    const Point& x = nodes[k].x;
    const MetricJets mj = metric_jets(space, x, 0);
    const Matrix g = mj.values();
    Matrix tangent(n, t);
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < t; ++a) tangent(i, a) = jac[k][i][a];
    const double gram = (tangent.transpose() * g * tangent).determinant();
    if (!(gram > kDensityFloor)) {
      throw QuadratureError("degenerate boundary parametrization at " + x.to_string() +
                            ": Gram determinant " + format_double(gram));
    }
    nodes[k].sqrt_det = std::sqrt(g.determinant());
    nodes[k].weight *= std::sqrt(gram) * std::exp(-space.weight.value(x));
  });
  return nodes;
}

inline std::vector<QuadNode> boundary_nodes(const WeightedSpace& space, int m) {
  std::vector<QuadNode> all;
  for (std::size_t p = 0; p < space.boundary.size(); ++p) {
    auto part = boundary_nodes(space, space.boundary[p], m, static_cast<int>(p));
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

/// Integrates K quantities at once: fn(node) returns K integrand values at the
/// node's point. Values are weighted, checked, and pairwise-summed in node order.
template <std::size_t K, class Fn>
std::array<double, K> integrate_nodes(const std::vector<QuadNode>& nodes, Fn&& fn) {
  std::vector<std::array<double, K>> vals(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { vals[i] = fn(nodes[i]); });
  std::array<double, K> out{};
  std::vector<double> column(nodes.size());
  for (std::size_t c = 0; c < K; ++c) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double v = vals[i][c];
      if (!std::isfinite(v)) {
        throw QuadratureError("non-finite integrand at node " + nodes[i].x.to_string());
      }
      if (v != 0.0 && !(nodes[i].sqrt_det > kDensityFloor)) {
        throw QuadratureError("integrand is nonzero at a singular chart point " + nodes[i].x.to_string());
      }
      column[i] = v * nodes[i].weight;
    }
    out[c] = pairwise_sum(column);
  }
  return out;
}

using PointFunction = std::function<double(const Point&)>;

inline double integrate_interior(const WeightedSpace& space, const PointFunction& f,
                                 const QuadratureRule& rule = {}) {
  const auto nodes = interior_nodes(space, rule.interior);
  return integrate_nodes<1>(nodes, [&](const QuadNode& q) { return std::array<double, 1>{f(q.x)}; })[0];
}

inline double integrate_boundary(const WeightedSpace& space, const PointFunction& f, const Patch& patch,
                                 const QuadratureRule& rule = {}) {
  const auto nodes = boundary_nodes(space, patch, rule.boundary);
  return integrate_nodes<1>(nodes, [&](const QuadNode& q) { return std::array<double, 1>{f(q.x)}; })[0];
}

inline double integrate_boundary(const WeightedSpace& space, const PointFunction& f,
                                 const QuadratureRule& rule = {}) {
  const auto nodes = boundary_nodes(space, rule.boundary);
  return integrate_nodes<1>(nodes, [&](const QuadNode& q) { return std::array<double, 1>{f(q.x)}; })[0];
}

}  // namespace gamma2
