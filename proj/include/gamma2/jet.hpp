#pragma once

/// \file
/// Truncated multivariate Taylor polynomials ("jets") in up to four variables.
///
/// A jet of order p at a point stores c_alpha = d^alpha u / alpha! for every
/// multi-index |alpha| <= p, in graded order (degree 0, then 1, ...). Storage is
/// sized for kMaxOrder so a jet of any order fits; arithmetic between jets of
/// different orders truncates to the smaller one. Taking a partial derivative
/// lowers the order by one, which is how the geometry layer assembles
/// Gamma(f,f) and L f as jet-valued fields and applies L a second time.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gamma2/errors.hpp"

namespace gamma2 {

inline constexpr int kMaxDim = 4;
inline constexpr int kMaxOrder = 4;
inline constexpr int kDefaultOrder = 3;
inline constexpr int kMaxCoeffs = 70;  // C(kMaxDim + kMaxOrder, kMaxOrder)

using MultiIndex = std::array<int, kMaxDim>;

inline int degree(const MultiIndex& alpha) {
  int d = 0;
  for (int a : alpha) d += a;
  return d;
}

namespace detail {

inline double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

/// Enumeration of multi-indices for one chart dimension plus the precomputed
/// product and derivative tables.
class IndexTable {
 public:
  struct Triple {
    std::uint8_t a, b, out;
  };

  explicit IndexTable(int dim) : dim_(dim) {
    lookup_.fill(-1);
    prefix_[0] = 0;
    for (int d = 0; d <= kMaxOrder; ++d) {
      MultiIndex alpha{};
      enumerate(d, 0, alpha);
      prefix_[d + 1] = static_cast<int>(indices_.size());
    }
    for (int i = 0; i < size(kMaxOrder); ++i) {
      for (int j = 0; j < size(kMaxOrder); ++j) {
        MultiIndex s{};
        for (int v = 0; v < kMaxDim; ++v) s[v] = indices_[i][v] + indices_[j][v];
        if (degree(s) > kMaxOrder) continue;
        triples_.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                            static_cast<std::uint8_t>(index_of(s))});
      }
    }
    std::stable_sort(triples_.begin(), triples_.end(), [&](const Triple& x, const Triple& y) {
      return degree_[x.out] < degree_[y.out];
    });
    for (int p = 0; p <= kMaxOrder; ++p) {
      product_prefix_[p] = static_cast<int>(
          std::count_if(triples_.begin(), triples_.end(),
                        [&](const Triple& t) { return degree_[t.out] <= p; }));
    }
    for (int v = 0; v < dim; ++v) {
      shift_[v].fill(-1);
      for (int j = 0; j < size(kMaxOrder - 1); ++j) {
        MultiIndex s = indices_[j];
        s[v] += 1;
        shift_[v][j] = index_of(s);
      }
    }
  }

  int dim() const { return dim_; }
  /// Number of coefficients of a jet of the given order.
  int size(int order) const { return prefix_[order + 1]; }
  const MultiIndex& multi_index(int k) const { return indices_[k]; }
  int degree_of(int k) const { return degree_[k]; }
  double factorial_of(int k) const { return alpha_factorial_[k]; }

  int index_of(const MultiIndex& alpha) const {
    int key = 0;
    for (int v = kMaxDim - 1; v >= 0; --v) {
      if (alpha[v] < 0 || alpha[v] > kMaxOrder) return -1;
      key = key * (kMaxOrder + 1) + alpha[v];
    }
    return lookup_[key];
  }

  /// Product terms contributing to coefficients of degree <= order.
  const Triple* triples() const { return triples_.data(); }
  int triple_count(int order) const { return product_prefix_[order]; }

  /// Index of alpha_j + e_v, for |alpha_j| < kMaxOrder.
  int shifted(int v, int j) const { return shift_[v][j]; }

 private:
  void enumerate(int remaining, int var, MultiIndex& alpha) {
    if (var == dim_ - 1) {
      alpha[var] = remaining;
      add(alpha);
      alpha[var] = 0;
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      alpha[var] = a;
      enumerate(remaining - a, var + 1, alpha);
    }
    alpha[var] = 0;
  }

  void add(const MultiIndex& alpha) {
    int key = 0;
    for (int v = kMaxDim - 1; v >= 0; --v) key = key * (kMaxOrder + 1) + alpha[v];
    lookup_[key] = static_cast<int>(indices_.size());
    indices_.push_back(alpha);
    degree_.push_back(degree(alpha));
    double f = 1.0;
    for (int a : alpha) f *= factorial(a);
    alpha_factorial_.push_back(f);
  }

  int dim_;
  std::vector<MultiIndex> indices_;
  std::vector<int> degree_;
  std::vector<double> alpha_factorial_;
  std::array<int, kMaxOrder + 2> prefix_{};
  std::array<int, 625> lookup_{};
  std::vector<Triple> triples_;
  std::array<int, kMaxOrder + 1> product_prefix_{};
  std::array<std::array<int, kMaxCoeffs>, kMaxDim> shift_{};
};

inline const IndexTable& index_table(int dim) {
  static const std::array<IndexTable, kMaxDim> tables{IndexTable(1), IndexTable(2), IndexTable(3),
                                                      IndexTable(4)};
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("jet dimension must be in 1..4, got " + std::to_string(dim));
  }
  return tables[dim - 1];
}

}  // namespace detail

class Jet {
 public:
  Jet() = default;

  static Jet constant(int dim, double value, int order = kDefaultOrder) {
    Jet j(dim, order);
    j.c_[0] = value;
    return j;
  }

  /// Jet of the coordinate function x_i expanded at the value x.
  static Jet variable(int dim, int i, double x, int order = kDefaultOrder) {
    if (i < 0 || i >= dim) {
      throw std::out_of_range("variable index " + std::to_string(i) + " out of range for dim " +
                              std::to_string(dim));
    }
    Jet j(dim, order);
    j.c_[0] = x;
    if (order >= 1) j.c_[1 + i] = 1.0;
    return j;
  }

  int dim() const { return dim_; }
  int order() const { return order_; }
  int size() const { return table_ ? table_->size(order_) : 0; }
  double value() const { return c_[0]; }

  /// Raw coefficient d^alpha u / alpha! by storage index.
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }

  double coefficient(const MultiIndex& alpha) const { return c_[checked_index(alpha)]; }

  /// d^alpha u at the expansion point.
  double derivative(const MultiIndex& alpha) const {
    const int k = checked_index(alpha);
    return c_[k] * table_->factorial_of(k);
  }

  /// First partial derivative as a jet of one order lower.
  Jet partial(int v) const {
    if (v < 0 || v >= dim_) throw std::out_of_range("partial: variable out of range");
    if (order_ == 0) throw std::out_of_range("partial: jet of order 0 has no derivatives");
    Jet r(dim_, order_ - 1);
    const int n = r.size();
    for (int j = 0; j < n; ++j) {
      const int s = table_->shifted(v, j);
      r.c_[j] = (table_->multi_index(j)[v] + 1) * c_[s];
    }
    return r;
  }

  Jet truncated(int order) const {
    if (order >= order_) return *this;
    Jet r(dim_, order);
    std::copy_n(c_.begin(), r.size(), r.c_.begin());
    return r;
  }

  bool is_constant() const {
    const int n = size();
    for (int k = 1; k < n; ++k) {
      if (c_[k] != 0.0) return false;
    }
    return true;
  }

  bool is_zero() const { return c_[0] == 0.0 && is_constant(); }

  Jet operator-() const {
    Jet r = *this;
    for (int k = 0; k < size(); ++k) r.c_[k] = -c_[k];
    return r;
  }

  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }
  Jet& operator-=(double s) {
    c_[0] -= s;
    return *this;
  }
  Jet& operator*=(double s) {
    for (int k = 0; k < size(); ++k) c_[k] *= s;
    return *this;
  }

  Jet& operator+=(const Jet& b) {
    require_same_dim(b);
    shrink_to(b.order_);
    for (int k = 0; k < size(); ++k) c_[k] += b.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    require_same_dim(b);
    shrink_to(b.order_);
    for (int k = 0; k < size(); ++k) c_[k] -= b.c_[k];
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) += s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    a.require_same_dim(b);
    Jet r(a.dim_, std::min(a.order_, b.order_));
    const auto* t = a.table_->triples();
    const int n = a.table_->triple_count(r.order_);
    for (int k = 0; k < n; ++k) r.c_[t[k].out] += a.c_[t[k].a] * b.c_[t[k].b];
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend Jet operator/(double s, const Jet& b);

  /// Composes a univariate function with this jet given f^(k)(value()) for k = 0..order.
  Jet compose(const std::array<double, kMaxOrder + 1>& derivs) const {
    Jet delta = *this;
    delta.c_[0] = 0.0;
    // Horner on the Taylor series sum_k f^(k)/k! delta^k
    Jet r = Jet::constant(dim_, derivs[order_] / detail::factorial(order_), order_);
    for (int k = order_ - 1; k >= 0; --k) {
      r = r * delta;
      r.c_[0] += derivs[k] / detail::factorial(k);
    }
    return r;
  }

 private:
  Jet(int dim, int order) : table_(&detail::index_table(dim)), dim_(dim), order_(order) {
    if (order < 0 || order > kMaxOrder) {
      throw std::invalid_argument("jet order must be in 0..4, got " + std::to_string(order));
    }
  }

  void require_same_dim(const Jet& b) const {
    if (dim_ != b.dim_) {
      throw std::invalid_argument("jet dimension mismatch: " + std::to_string(dim_) + " vs " +
                                  std::to_string(b.dim_));
    }
  }

  void shrink_to(int order) {
    if (order >= order_) return;
    const int old = size();
    order_ = order;
    for (int k = size(); k < old; ++k) c_[k] = 0.0;
  }

  int checked_index(const MultiIndex& alpha) const {
    for (int v = dim_; v < kMaxDim; ++v) {
      if (alpha[v] != 0) throw std::out_of_range("multi-index exceeds jet dimension");
    }
    if (degree(alpha) > order_) {
      throw std::out_of_range("derivative order " + std::to_string(degree(alpha)) +
                              " exceeds jet order " + std::to_string(order_));
    }
    return table_->index_of(alpha);
  }

  const detail::IndexTable* table_ = nullptr;
  int dim_ = 0;
  int order_ = 0;
  std::array<double, kMaxCoeffs> c_{};
};

/// Derivative of the jet at multi-index alpha (coefficient times alpha!).
inline double extract(const Jet& a, const MultiIndex& alpha) { return a.derivative(alpha); }

inline Jet seed_variable(int i, std::span<const double> x, int order = kDefaultOrder) {
  if (i < 0 || static_cast<std::size_t>(i) >= x.size()) {
    throw std::out_of_range("variable index " + std::to_string(i) + " out of range for dim " +
                            std::to_string(x.size()));
  }
  return Jet::variable(static_cast<int>(x.size()), i, x[i], order);
}

inline Jet reciprocal(const Jet& b) {
  const double v = b.value();
  if (v == 0.0) throw DomainError("division by a jet with zero value");
  std::array<double, kMaxOrder + 1> d{};
  double p = 1.0 / v;
  for (int k = 0; k <= kMaxOrder; ++k) {
    d[k] = ((k % 2) ? -1.0 : 1.0) * detail::factorial(k) * p;
    p /= v;
  }
  return b.compose(d);
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (b.is_constant()) {
    if (b.value() == 0.0) throw DomainError("division by a jet with zero value");
    return a.truncated(b.order()) * (1.0 / b.value());
  }
  return a * reciprocal(b);
}

inline Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

inline Jet exp(const Jet& a) {
  std::array<double, kMaxOrder + 1> d;
  d.fill(std::exp(a.value()));
  return a.compose(d);
}

inline Jet log(const Jet& a) {
  const double v = a.value();
  if (!(v > 0.0)) throw DomainError("log of nonpositive value " + std::to_string(v));
  std::array<double, kMaxOrder + 1> d{};
  d[0] = std::log(v);
  double p = 1.0 / v;
  for (int k = 1; k <= kMaxOrder; ++k) {
    d[k] = ((k % 2) ? 1.0 : -1.0) * detail::factorial(k - 1) * p;
    p /= v;
  }
  return a.compose(d);
}

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose({s, c, -s, -c, s});
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose({c, -s, -c, s, c});
}

inline Jet tanh(const Jet& a) {
  const double t = std::tanh(a.value());
  const double u = 1.0 - t * t;
  return a.compose({t, u, -2.0 * t * u, u * (6.0 * t * t - 2.0), u * (16.0 * t - 24.0 * t * t * t)});
}

inline Jet erf(const Jet& a) {
  const double t = a.value();
  const double e = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-t * t);
  return a.compose({std::erf(t), e, -2.0 * t * e, (4.0 * t * t - 2.0) * e, (12.0 * t - 8.0 * t * t * t) * e});
}

/// a^r for a real exponent r. Negative bases are allowed only for integer r.
inline Jet pow(const Jet& a, double r) {
  const double v = a.value();
  const bool integral = std::floor(r) == r;
  if (r == 0.0) return Jet::constant(a.dim(), 1.0, a.order());
  if (v < 0.0 && !integral) {
    throw DomainError("pow of negative value " + std::to_string(v) + " with non-integer exponent");
  }
  if (v == 0.0 && (!integral || r < 0.0)) {
    throw DomainError("pow of zero value with exponent " + std::to_string(r));
  }
  std::array<double, kMaxOrder + 1> d{};
  double falling = 1.0;
  for (int k = 0; k <= kMaxOrder; ++k) {
    d[k] = falling == 0.0 ? 0.0 : falling * std::pow(v, r - k);
    falling *= (r - k);
  }
  return a.compose(d);
}

inline Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw DomainError("sqrt of nonpositive value " + std::to_string(a.value()));
  return pow(a, 0.5);
}

inline Jet pow(const Jet& a, const Jet& b) {
  if (b.is_constant()) return pow(a.truncated(b.order()), b.value());
  if (!(a.value() > 0.0)) {
    throw DomainError("pow with variable exponent needs a positive base, got " +
                      std::to_string(a.value()));
  }
  return exp(b * log(a));
}

}  // namespace gamma2
