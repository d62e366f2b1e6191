#pragma once

/// \file
/// A small expression language for scalar fields.
///
///   expr  := term (('+' | '-') term)*
///   term  := unary (('*' | '/') unary)*
///   unary := '-' unary | power
///   power := atom ('^' unary)?          right-associative, binds tighter than '-'
///   atom  := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
///
/// "-x^2" is -(x^2). Functions: sin cos exp log sqrt tanh (one argument) and
/// pow (two). The constant pi is predefined. Variables are x y z w, or x1..x4,
/// unless the caller supplies its own names.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gamma2/errors.hpp"
#include "gamma2/jet.hpp"
#include "gamma2/point.hpp"

namespace gamma2 {

enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh, Pow };

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Tanh: return "tanh";
    case Func::Pow: return "pow";
  }
  return "?";
}

struct ExprNode {
  enum class Kind { Number, Variable, Binary, Negate, Call };
  Kind kind = Kind::Number;
  double number = 0.0;
  int var = -1;
  char op = 0;
  Func fn = Func::Sin;
  int lhs = -1;
  int rhs = -1;
};

namespace detail {

inline double apply(Func f, double a, double b = 0.0) {
  switch (f) {
    case Func::Sin: return std::sin(a);
    case Func::Cos: return std::cos(a);
    case Func::Exp: return std::exp(a);
    case Func::Log: return std::log(a);
    case Func::Sqrt: return std::sqrt(a);
    case Func::Tanh: return std::tanh(a);
    case Func::Pow: return std::pow(a, b);
  }
  return NAN;
}

inline Jet apply(Func f, const Jet& a, const Jet& b) {
  switch (f) {
    case Func::Sin: return sin(a);
    case Func::Cos: return cos(a);
    case Func::Exp: return exp(a);
    case Func::Log: return log(a);
    case Func::Sqrt: return sqrt(a);
    case Func::Tanh: return tanh(a);
    case Func::Pow: return pow(a, b);
  }
  return a;
}

inline double binary(char op, double a, double b) {
  switch (op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/': return a / b;
    default: return std::pow(a, b);
  }
}

inline Jet binary(char op, const Jet& a, const Jet& b) {
  switch (op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/': return a / b;
    default: return pow(a, b);
  }
}

}  // namespace detail

/// Immutable parsed expression over a fixed list of variables.
class Expr {
 public:
  Expr() = default;

  int arity() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& variables() const { return names_; }
  const std::vector<ExprNode>& nodes() const { return nodes_; }
  int root() const { return root_; }

  /// Value-only evaluation with plain doubles. Domain violations give NaN/inf.
  double evaluate_value(std::span<const double> vars) const { return eval_value(root_, vars); }

  /// Folds the expression over jet arithmetic with the given variable jets.
  Jet evaluate(std::span<const Jet> vars) const {
    if (static_cast<int>(vars.size()) < arity() || vars.empty()) {
      throw std::invalid_argument("expression evaluated with too few variables");
    }
    return eval_jet(root_, vars);
  }

  /// Jet of the expression at x in chart coordinates; domain errors carry the point.
  Jet evaluate(const Point& x, int order = kDefaultOrder) const {
    if (x.dim() != arity()) {
      throw std::invalid_argument("point dimension " + std::to_string(x.dim()) +
                                  " does not match expression arity " + std::to_string(arity()));
    }
    const auto seeds = seed_point(x, order);
    try {
      return eval_jet(root_, std::span<const Jet>(seeds.data(), x.dim()));
    } catch (const DomainError& e) {
      throw DomainError(std::string(e.what()) + " at point " + x.to_string());
    }
  }

  std::string to_string() const;

 private:
  friend class Parser;

  double eval_value(int k, std::span<const double> vars) const {
    const ExprNode& n = nodes_[k];
    switch (n.kind) {
      case ExprNode::Kind::Number: return n.number;
      case ExprNode::Kind::Variable: return vars[n.var];
      case ExprNode::Kind::Negate: return -eval_value(n.lhs, vars);
      case ExprNode::Kind::Binary:
        return detail::binary(n.op, eval_value(n.lhs, vars), eval_value(n.rhs, vars));
      case ExprNode::Kind::Call:
        return detail::apply(n.fn, eval_value(n.lhs, vars), n.rhs >= 0 ? eval_value(n.rhs, vars) : 0.0);
    }
    return NAN;
  }

  Jet eval_jet(int k, std::span<const Jet> vars) const {
    const ExprNode& n = nodes_[k];
    const Jet& proto = vars[0];
    switch (n.kind) {
      case ExprNode::Kind::Number: return Jet::constant(proto.dim(), n.number, proto.order());
      case ExprNode::Kind::Variable: return vars[n.var];
      case ExprNode::Kind::Negate: return -eval_jet(n.lhs, vars);
      case ExprNode::Kind::Binary:
        return detail::binary(n.op, eval_jet(n.lhs, vars), eval_jet(n.rhs, vars));
      case ExprNode::Kind::Call: {
        Jet a = eval_jet(n.lhs, vars);
        if (n.rhs < 0) return detail::apply(n.fn, a, a);
        return detail::apply(n.fn, a, eval_jet(n.rhs, vars));
      }
    }
    return proto;
  }

  void print(int k, int min_prec, std::string& out) const;

  std::vector<ExprNode> nodes_;
  std::vector<std::string> names_;
  int root_ = -1;
};

namespace detail {

inline int precedence(const ExprNode& n) {
  switch (n.kind) {
    case ExprNode::Kind::Binary:
      if (n.op == '+' || n.op == '-') return 1;
      if (n.op == '*' || n.op == '/') return 2;
      return 4;
    case ExprNode::Kind::Negate: return 3;
    default: return 5;
  }
}

}  // namespace detail

inline void Expr::print(int k, int min_prec, std::string& out) const {
  const ExprNode& n = nodes_[k];
  const int prec = detail::precedence(n);
  const bool paren = prec < min_prec;
  if (paren) out += '(';
  switch (n.kind) {
    case ExprNode::Kind::Number: out += format_double(n.number); break;
    case ExprNode::Kind::Variable: out += names_[n.var]; break;
    case ExprNode::Kind::Negate:
      out += '-';
      print(n.lhs, 3, out);
      break;
    case ExprNode::Kind::Binary:
      if (n.op == '^') {
        print(n.lhs, 5, out);
        out += '^';
        print(n.rhs, 3, out);
      } else if (n.op == '+' || n.op == '-') {
        print(n.lhs, 1, out);
        out += n.op == '+' ? " + " : " - ";
        print(n.rhs, 2, out);
      } else {
        print(n.lhs, 2, out);
        out += n.op;
        print(n.rhs, 3, out);
      }
      break;
    case ExprNode::Kind::Call:
      out += func_name(n.fn);
      out += '(';
      print(n.lhs, 0, out);
      if (n.rhs >= 0) {
        out += ", ";
        print(n.rhs, 0, out);
      }
      out += ')';
      break;
  }
  if (paren) out += ')';
}

/// Canonical text with minimal parentheses; parsing it gives back the same tree.
inline std::string Expr::to_string() const {
  std::string s;
  if (root_ >= 0) print(root_, 0, s);
  return s;
}

inline std::vector<std::string> default_variable_names(int dim) {
  static const char* names[] = {"x", "y", "z", "w"};
  std::vector<std::string> v;
  for (int i = 0; i < dim; ++i) v.emplace_back(names[i]);
  return v;
}

class Parser {
 public:
  static constexpr int kMaxDepth = 200;

  Parser(std::string_view src, std::vector<std::string> names, bool default_aliases)
      : src_(src), default_aliases_(default_aliases) {
    expr_.names_ = std::move(names);
  }

  Expr run() {
    skip_ws();
    expr_.root_ = parse_expr();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError(pos_, "operator or end of input", describe_here());
    return std::move(expr_);
  }

 private:
  int add(ExprNode n) {
    expr_.nodes_.push_back(n);
    return static_cast<int>(expr_.nodes_.size()) - 1;
  }

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  std::string describe_here() const {
    if (pos_ >= src_.size()) return "end of input";
    const unsigned char c = static_cast<unsigned char>(src_[pos_]);
    if (c >= 0x20 && c < 0x7f) return std::string("'") + src_[pos_] + "'";
    char buf[16];
    std::snprintf(buf, sizeof buf, "byte 0x%02x", c);
    return buf;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size() || src_[pos_] != c) {
      throw ParseError(pos_, std::string("'") + c + "'", describe_here());
    }
    ++pos_;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser, std::size_t pos) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError(pos, "shallower nesting", "nesting deeper than 200");
    }
    ~DepthGuard() { --p.depth_; }
  };

  int parse_expr() {
    DepthGuard guard(*this, pos_);
    int lhs = parse_term();
    while (true) {
      skip_ws();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        const char op = src_[pos_++];
        const int rhs = parse_term();
        lhs = add({ExprNode::Kind::Binary, 0.0, -1, op, Func::Sin, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    while (true) {
      skip_ws();
      if (pos_ < src_.size() && (src_[pos_] == '*' || src_[pos_] == '/')) {
        const char op = src_[pos_++];
        const int rhs = parse_unary();
        lhs = add({ExprNode::Kind::Binary, 0.0, -1, op, Func::Sin, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    DepthGuard guard(*this, pos_);
    if (peek('-')) {
      ++pos_;
      const int operand = parse_unary();
      return add({ExprNode::Kind::Negate, 0.0, -1, 0, Func::Sin, operand, -1});
    }
    return parse_power();
  }

  int parse_power() {
    const int base = parse_atom();
    if (peek('^')) {
      ++pos_;
      const int exponent = parse_unary();
      return add({ExprNode::Kind::Binary, 0.0, -1, '^', Func::Sin, base, exponent});
    }
    return base;
  }

  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  int parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(pos_, "expression", "end of input");
    const char c = src_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      return parse_number();
    }
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      expect(')');
      return inner;
    }
    if (is_ident_start(c)) return parse_ident();
    throw ParseError(pos_, "expression", describe_here());
  }

  int parse_number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
      if (q < src_.size() && is_digit(src_[q])) {
        while (q < src_.size() && is_digit(src_[q])) ++q;
        pos_ = q;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || !std::isfinite(v)) {
      throw ParseError(start, "finite number", "'" + std::string(src_.substr(start, pos_ - start)) + "'");
    }
    return add({ExprNode::Kind::Number, v, -1, 0, Func::Sin, -1, -1});
  }

  int variable_index(std::string_view name) const {
    for (std::size_t i = 0; i < expr_.names_.size(); ++i) {
      if (expr_.names_[i] == name) return static_cast<int>(i);
    }
    return -1;
  }

  int parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    const std::string quoted = "'" + std::string(name) + "'";

    static constexpr std::pair<std::string_view, Func> kFuncs[] = {
        {"sin", Func::Sin},   {"cos", Func::Cos},   {"exp", Func::Exp}, {"log", Func::Log},
        {"sqrt", Func::Sqrt}, {"tanh", Func::Tanh}, {"pow", Func::Pow}};

    if (peek('(')) {
      for (const auto& [fname, fn] : kFuncs) {
        if (fname != name) continue;
        ++pos_;
        const int a = parse_expr();
        int b = -1;
        if (fn == Func::Pow) {
          expect(',');
          b = parse_expr();
        }
        expect(')');
        return add({ExprNode::Kind::Call, 0.0, -1, 0, fn, a, b});
      }
      throw ParseError(start, "function name", quoted);
    }
    for (const auto& [fname, fn] : kFuncs) {
      if (fname == name) throw ParseError(pos_, "'(' after " + std::string(name), describe_here());
    }
    if (name == "pi") return add({ExprNode::Kind::Number, std::numbers::pi, -1, 0, Func::Sin, -1, -1});

    int idx = variable_index(name);
    if (idx < 0 && default_aliases_) {
      static constexpr std::string_view kDefault[] = {"x", "y", "z", "w"};
      static constexpr std::string_view kIndexed[] = {"x1", "x2", "x3", "x4"};
      for (int i = 0; i < kMaxDim; ++i) {
        if (name == kDefault[i] || name == kIndexed[i]) {
          if (i >= static_cast<int>(expr_.names_.size())) {
            throw ParseError(start, "variable of dimension " + std::to_string(expr_.names_.size()),
                             quoted);
          }
          idx = i;
        }
      }
    }
    if (idx < 0) throw ParseError(start, "variable or function", quoted);
    return add({ExprNode::Kind::Variable, 0.0, idx, 0, Func::Sin, -1, -1});
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  bool default_aliases_;
  Expr expr_;
};

/// Parses an expression in the chart variables of a dim-dimensional space.
inline Expr parse(std::string_view src, int dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("expression dimension must be in 1..4");
  return Parser(src, default_variable_names(dim), true).run();
}

/// Parses an expression over caller-named variables (patch parameters, or none
/// for a constant expression).
inline Expr parse(std::string_view src, std::vector<std::string> names) {
  return Parser(src, std::move(names), false).run();
}

}  // namespace gamma2
