#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gamma2/expr.hpp"
#include "gamma2/jet.hpp"
#include "gamma2/point.hpp"

namespace gamma2 {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
};

using Box = std::vector<Interval>;

/// A smooth scalar field on a chart, evaluated to a jet in chart coordinates.
///
/// Expression-backed fields keep their source expression for provenance;
/// composite fields (products, the Neumann construction) are closures.
class ScalarField {
 public:
  using Fn = std::function<Jet(const Point&, int order)>;

  ScalarField() = default;
  ScalarField(int dim, Fn fn, std::string label)
      : dim_(dim), fn_(std::move(fn)), label_(std::move(label)) {}

  static ScalarField expression(const Expr& e) {
    auto shared = std::make_shared<const Expr>(e);
    return ScalarField(
        e.arity(), [shared](const Point& x, int order) { return shared->evaluate(x, order); },
        e.to_string(), shared);
  }

  static ScalarField parse(std::string_view src, int dim) { return expression(gamma2::parse(src, dim)); }

  static ScalarField constant(int dim, double c) {
    return ScalarField(
        dim, [dim, c](const Point&, int order) { return Jet::constant(dim, c, order); },
        format_double(c));
  }

  explicit operator bool() const { return static_cast<bool>(fn_); }
  int dim() const { return dim_; }
  const std::string& label() const { return label_; }
  /// Source expression, when the field came from one.
  const Expr* expression() const { return expr_.get(); }

  Jet operator()(const Point& x, int order = kDefaultOrder) const {
    if (x.dim() != dim_) {
      throw std::invalid_argument("field '" + label_ + "' of dimension " + std::to_string(dim_) +
                                  " evaluated at a point of dimension " + std::to_string(x.dim()));
    }
    return fn_(x, order);
  }

  double value(const Point& x) const { return (*this)(x, 0).value(); }

  ScalarField with_label(std::string label) const {
    ScalarField f = *this;
    f.label_ = std::move(label);
    return f;
  }

  /// x -> f(x - offset): the field carried along a chart translation.
  ScalarField translated(const Point& offset) const {
    auto fn = fn_;
    const int n = dim_;
    return ScalarField(
        n,
        [fn, offset, n](const Point& x, int order) {
          Point y = x;
          for (int i = 0; i < n; ++i) y[i] -= offset[i];
          return fn(y, order);
        },
        label_ + " translated by " + offset.to_string());
  }

  friend ScalarField operator*(const ScalarField& a, const ScalarField& b) {
    require_same_dim(a, b);
    auto fa = a.fn_, fb = b.fn_;
    return ScalarField(
        a.dim_, [fa, fb](const Point& x, int order) { return fa(x, order) * fb(x, order); },
        "(" + a.label_ + ")*(" + b.label_ + ")");
  }

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_dim(a, b);
    auto fa = a.fn_, fb = b.fn_;
    return ScalarField(
        a.dim_, [fa, fb](const Point& x, int order) { return fa(x, order) + fb(x, order); },
        a.label_ + " + " + b.label_);
  }

  friend ScalarField operator*(double s, const ScalarField& a) {
    auto fa = a.fn_;
    return ScalarField(
        a.dim_, [fa, s](const Point& x, int order) { return fa(x, order) * s; },
        format_double(s) + "*(" + a.label_ + ")");
  }

 private:
  ScalarField(int dim, Fn fn, std::string label, std::shared_ptr<const Expr> expr)
      : dim_(dim), fn_(std::move(fn)), label_(std::move(label)), expr_(std::move(expr)) {}

  static void require_same_dim(const ScalarField& a, const ScalarField& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("field dimension mismatch");
  }

  int dim_ = 0;
  Fn fn_;
  std::string label_;
  std::shared_ptr<const Expr> expr_;
};

}  // namespace gamma2
