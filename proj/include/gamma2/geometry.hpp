#pragma once

/// \file
/// Pointwise weighted-manifold calculus from jets.
///
/// Conventions:
///   Christoffel  Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
///   Ricci        R_ij = d_k Gamma^k_ij - d_j Gamma^k_ik + Gamma^k_kl Gamma^l_ij - Gamma^k_jl Gamma^l_ik
///                (the round sphere has positive Ricci)
///   Hessian      H_ij(f) = d_i d_j f - Gamma^k_ij d_k f
///   Carre du champ  Gamma(f, h) = g^{ij} d_i f d_j h
///   Witten Laplacian  L f = g^{ij} H_ij(f) - Gamma(V, f)
///   Gamma_2(f) = 1/2 L Gamma(f, f) - Gamma(f, L f)
///   |H|^2_HS = g^{ik} g^{jl} H_ij H_kl
///
/// Gamma(f, f) and L f are formed as jets one and two orders below f, so L is
/// applied to Gamma(f, f) exactly; nothing is finite-differenced.

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "gamma2/errors.hpp"
#include "gamma2/jet.hpp"
#include "gamma2/point.hpp"
#include "gamma2/space.hpp"

namespace gamma2 {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

inline constexpr double kMetricFloor = 1e-10;

/// Lower-index symmetric bilinear form at a point.
class SymmetricBilinear {
 public:
  SymmetricBilinear() = default;
  explicit SymmetricBilinear(const Matrix& m) : m_((m + m.transpose()) * 0.5) {}

  static SymmetricBilinear zero(int n) { return SymmetricBilinear(Matrix::Zero(n, n)); }

  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  double operator()(const Vector& u, const Vector& v) const { return u.dot(m_ * v); }
  const Matrix& matrix() const { return m_; }

  friend SymmetricBilinear operator+(const SymmetricBilinear& a, const SymmetricBilinear& b) {
    return SymmetricBilinear(a.m_ + b.m_);
  }

 private:
  Matrix m_;
};

/// Eigenvalues of A relative to the metric G (A v = lambda G v), ascending.
inline Vector relative_eigenvalues(const SymmetricBilinear& a, const Matrix& g) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(a.matrix(), g, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Metric and inverse-metric jets at a point.
struct MetricJets {
  int dim = 0;
  std::array<std::array<Jet, kMaxDim>, kMaxDim> g;
  std::array<std::array<Jet, kMaxDim>, kMaxDim> ginv;

  Matrix values() const {
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = g[i][j].value();
    return m;
  }
  Matrix inverse_values() const {
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = ginv[i][j].value();
    return m;
  }

  /// Gamma(a, b) = g^{ij} d_i a d_j b as a jet of order min(a, b) - 1.
  Jet gamma(const Jet& a, const Jet& b) const {
    std::array<Jet, kMaxDim> da, db;
    for (int i = 0; i < dim; ++i) {
      da[i] = a.partial(i);
      db[i] = b.partial(i);
    }
    return contract(da, db);
  }

  Jet contract(const std::array<Jet, kMaxDim>& da, const std::array<Jet, kMaxDim>& db) const {
    Jet sum;
    for (int i = 0; i < dim; ++i) {
      Jet row = ginv[i][0] * db[0];
      for (int j = 1; j < dim; ++j) row += ginv[i][j] * db[j];
      if (i == 0) {
        sum = da[0] * row;
      } else {
        sum += da[i] * row;
      }
    }
    return sum;
  }
};

/// Checks that the metric matrix is SPD; returns its smallest eigenvalue.
inline double require_spd(const Matrix& g, const Point& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (!(lmin > kMetricFloor)) {
    throw GeometryError("metric not positive definite at " + x.to_string() +
                        ": minimum eigenvalue " + format_double(lmin));
  }
  return lmin;
}

inline MetricJets metric_jets(const WeightedSpace& space, const Point& x, int order = kDefaultOrder) {
  const int n = space.dim;
  MetricJets m;
  m.dim = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m.g[i][j] = space.g(i, j)(x, order);
      m.g[j][i] = m.g[i][j];
    }
  }
  require_spd(m.values(), x);

  // Gauss-Jordan over jets; the SPD check makes every pivot positive.
  auto a = m.g;
  auto& b = m.ginv;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b[i][j] = Jet::constant(n, i == j ? 1.0 : 0.0, order);
  for (int k = 0; k < n; ++k) {
    if (!(a[k][k].value() > 0.0)) throw GeometryError("singular metric at " + x.to_string());
    const Jet inv = reciprocal(a[k][k]);
    for (int j = 0; j < n; ++j) {
      a[k][j] = a[k][j] * inv;
      b[k][j] = b[k][j] * inv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == k) continue;
      const Jet f = a[r][k];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= f * a[k][j];
        b[r][j] -= f * b[k][j];
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Jet s = (b[i][j] + b[j][i]) * 0.5;
      b[i][j] = s;
      b[j][i] = s;
    }
  }
  return m;
}

/// Everything the differential operators consume at one point, as plain values.
struct PointFrame {
  Point point;
  Matrix g;
  Matrix ginv;
  double sqrt_det = 0.0;
  /// christoffel[(k*n + i)*n + j] = Gamma^k_ij
  std::vector<double> christoffel;
  /// dg[(k*n + i)*n + j] = d_k g_ij
  std::vector<double> dg;
  /// ddg[((k*n + l)*n + i)*n + j] = d_k d_l g_ij
  std::vector<double> ddg;

  double gamma(int k, int i, int j) const {
    const int n = static_cast<int>(g.rows());
    return christoffel[(k * n + i) * n + j];
  }
};

class LocalGeometry {
 public:
  LocalGeometry(const WeightedSpace& space, const Point& x, int order = kDefaultOrder)
      : n_(space.dim), x_(x), metric_(metric_jets(space, x, order)) {
    if (x.dim() != n_) throw std::invalid_argument("point dimension does not match space");
    const int n = n_;
    std::array<std::array<std::array<Jet, kMaxDim>, kMaxDim>, kMaxDim> dg;  // dg[l][i][j] = d_l g_ij
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          dg[l][i][j] = metric_.g[i][j].partial(l);
          dg[l][j][i] = dg[l][i][j];
        }
    christoffel_.resize(n * n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        std::array<Jet, kMaxDim> lowered;  // Gamma_{l,ij}
        for (int l = 0; l < n; ++l) lowered[l] = (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]) * 0.5;
        for (int k = 0; k < n; ++k) {
          Jet s = metric_.ginv[k][0] * lowered[0];
          for (int l = 1; l < n; ++l) s += metric_.ginv[k][l] * lowered[l];
          christoffel_[(k * n + i) * n + j] = s;
          christoffel_[(k * n + j) * n + i] = s;
        }
      }
    }
    weight_ = space.weight(x, order);
    for (int i = 0; i < n; ++i) dweight_[i] = weight_.partial(i);
  }

  int dim() const { return n_; }
  const Point& point() const { return x_; }
  const MetricJets& metric() const { return metric_; }
  const Jet& christoffel(int k, int i, int j) const { return christoffel_[(k * n_ + i) * n_ + j]; }
  const Jet& weight() const { return weight_; }

  Jet gamma(const Jet& a, const Jet& b) const { return metric_.gamma(a, b); }

  /// Covariant Hessian as n*n jets of order f.order() - 2.
  std::vector<Jet> hessian_jets(const Jet& f) const {
    const int n = n_;
    std::array<Jet, kMaxDim> df;
    for (int i = 0; i < n; ++i) df[i] = f.partial(i);
    std::vector<Jet> h(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Jet hij = df[i].partial(j);
        for (int k = 0; k < n; ++k) hij -= christoffel(k, i, j) * df[k];
        h[i * n + j] = hij;
        h[j * n + i] = hij;
      }
    }
    return h;
  }

  SymmetricBilinear hessian(const Jet& f) const {
    const auto h = hessian_jets(f);
    Matrix m(n_, n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = h[i * n_ + j].value();
    return SymmetricBilinear(m);
  }

  /// Unweighted Laplace-Beltrami g^{ij} H_ij as a jet.
  Jet laplace_beltrami(const Jet& f) const {
    const auto h = hessian_jets(f);
    Jet s = metric_.ginv[0][0] * h[0];
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        if (i || j) s += metric_.ginv[i][j] * h[i * n_ + j];
    return s;
  }

  /// Witten Laplacian L f = Delta f - Gamma(V, f) as a jet of order f.order() - 2.
  Jet laplacian(const Jet& f) const {
    std::array<Jet, kMaxDim> df;
    for (int i = 0; i < n_; ++i) df[i] = f.partial(i);
    return laplace_beltrami(f) - metric_.contract(dweight_, df);
  }

  /// Contravariant gradient g^{ij} d_j f.
  Vector gradient(const Jet& f) const {
    Vector d(n_);
    for (int i = 0; i < n_; ++i) d(i) = f[1 + i];
    return metric_.inverse_values() * d;
  }

  double gamma2(const Jet& f) const {
    if (f.order() < 3) throw std::invalid_argument("gamma2 needs a jet of order 3");
    const Jet carre = gamma(f, f);
    const Jet lf = laplacian(f);
    return 0.5 * laplacian(carre).value() - gamma(f, lf).value();
  }

  SymmetricBilinear ricci() const {
    const int n = n_;
    Matrix r = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) {
          s += christoffel(k, i, j)[1 + k];
          s -= christoffel(k, i, k)[1 + j];
          for (int l = 0; l < n; ++l) {
            s += christoffel(k, k, l).value() * christoffel(l, i, j).value();
            s -= christoffel(k, j, l).value() * christoffel(l, i, k).value();
          }
        }
        r(i, j) = s;
      }
    }
    return SymmetricBilinear(r);
  }

  SymmetricBilinear weight_hessian() const { return hessian(weight_); }

  SymmetricBilinear bakry_emery_ricci() const { return ricci() + weight_hessian(); }

  double hs_norm_sq(const SymmetricBilinear& h) const {
    const Matrix gi = metric_.inverse_values();
    const Matrix a = gi * h.matrix();
    return (a * a).trace();
  }

  PointFrame frame() const {
    const int n = n_;
    PointFrame f;
    f.point = x_;
    f.g = metric_.values();
    f.ginv = metric_.inverse_values();
    f.sqrt_det = std::sqrt(f.g.determinant());
    f.christoffel.resize(n * n * n);
    f.dg.resize(n * n * n);
    f.ddg.resize(n * n * n * n);
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          f.christoffel[(k * n + i) * n + j] = christoffel(k, i, j).value();
          MultiIndex a{};
          a[k] = 1;
          f.dg[(k * n + i) * n + j] = metric_.g[i][j].derivative(a);
          for (int l = 0; l < n; ++l) {
            MultiIndex b{};
            b[k] += 1;
            b[l] += 1;
            f.ddg[((k * n + l) * n + i) * n + j] = metric_.g[i][j].derivative(b);
          }
        }
      }
    }
    return f;
  }

 private:
  int n_;
  Point x_;
  MetricJets metric_;
  std::vector<Jet> christoffel_;
  Jet weight_;
  std::array<Jet, kMaxDim> dweight_;
};

// Per-point entry points. Each builds a LocalGeometry; loops over many fields
// at one point should build it once instead.

inline PointFrame frame_at(const WeightedSpace& space, const Point& x) {
  return LocalGeometry(space, x).frame();
}

inline SymmetricBilinear ricci(const WeightedSpace& space, const Point& x) {
  return LocalGeometry(space, x).ricci();
}

inline SymmetricBilinear hessian(const WeightedSpace& space, const ScalarField& f, const Point& x) {
  return LocalGeometry(space, x).hessian(f(x));
}

inline Vector grad(const WeightedSpace& space, const ScalarField& f, const Point& x) {
  return LocalGeometry(space, x).gradient(f(x, 1));
}

inline double gamma1(const WeightedSpace& space, const ScalarField& f, const ScalarField& h,
                     const Point& x) {
  return metric_jets(space, x, 1).gamma(f(x, 1), h(x, 1)).value();
}

inline double witten_laplacian(const WeightedSpace& space, const ScalarField& f, const Point& x) {
  return LocalGeometry(space, x).laplacian(f(x)).value();
}

inline double gamma2(const WeightedSpace& space, const ScalarField& f, const Point& x) {
  return LocalGeometry(space, x).gamma2(f(x));
}

inline double hs_norm_sq(const WeightedSpace& space, const SymmetricBilinear& h, const Point& x) {
  return LocalGeometry(space, x).hs_norm_sq(h);
}

inline SymmetricBilinear bakry_emery_ricci(const WeightedSpace& space, const Point& x) {
  return LocalGeometry(space, x).bakry_emery_ricci();
}

}  // namespace gamma2
