#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>

#include "gamma2/jet.hpp"

namespace gamma2 {

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// A chart point with 1..4 coordinates.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords) : Point(std::span<const double>(coords.begin(), coords.size())) {}
  explicit Point(std::span<const double> coords) : dim_(static_cast<int>(coords.size())) {
    if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("point dimension must be in 1..4");
    for (int i = 0; i < dim_; ++i) c_[i] = coords[i];
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return c_[i]; }
  double& operator[](int i) { return c_[i]; }
  std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

  bool finite() const {
    for (int i = 0; i < dim_; ++i) {
      if (!std::isfinite(c_[i])) return false;
    }
    return true;
  }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < dim_; ++i) {
      if (i) s += ", ";
      s += format_double(c_[i]);
    }
    return s + ")";
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (a.dim_ != b.dim_) return false;
    for (int i = 0; i < a.dim_; ++i) {
      if (a.c_[i] != b.c_[i]) return false;
    }
    return true;
  }

 private:
  std::array<double, kMaxDim> c_{};
  int dim_ = 0;
};

/// Coordinate jets seeded at x.
inline std::array<Jet, kMaxDim> seed_point(const Point& x, int order = kDefaultOrder) {
  std::array<Jet, kMaxDim> seeds;
  for (int i = 0; i < x.dim(); ++i) seeds[i] = Jet::variable(x.dim(), i, x[i], order);
  return seeds;
}

}  // namespace gamma2
