#pragma once
// Potential expressions: a small recursive-descent grammar over x, numbers,
// + - * / ^ and sin cos exp sech tanh log. Trees are immutable and shared.

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace trf {

struct ParseError : std::invalid_argument {
  size_t offset;  // byte offset of the offending token
  size_t length;  // span length (0 at end of input)
  ParseError(const std::string& msg, size_t off, size_t len)
      : std::invalid_argument(msg + " at offset " + std::to_string(off)), offset(off), length(len) {}
};

struct EvalError : std::domain_error {
  using std::domain_error::domain_error;
};

class Expr {
 public:
  enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Sech, Tanh, Log };

  static Expr constant(double c);
  static Expr var();
  static Expr unary(Kind k, Expr a);
  static Expr binary(Kind k, Expr a, Expr b);

  Kind kind() const;
  double value() const;  // Const only
  Expr lhs() const;
  Expr rhs() const;  // null-safe only for binary kinds

  double eval(double x) const;
  // Symbolic derivative in x with light constant folding.
  Expr derivative() const;
  // Canonical text; parse(print()) reproduces the same tree.
  std::string print() const;
  bool is_const() const { return kind() == Kind::Const; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  std::shared_ptr<const Node> node_;
  static double eval_node(const Node& n, double x);
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
};

Expr parse_potential(const std::string& text);

// A real potential on the line or on an interval: either a parsed expression
// (exact derivatives) or an opaque callable (finite-difference derivatives).
class Potential {
 public:
  Potential() : Potential(Expr::constant(0.0)) {}
  explicit Potential(Expr e);
  Potential(std::function<double(double)> f, std::string label);
  static Potential parse(const std::string& text) { return Potential(parse_potential(text)); }

  double operator()(double x) const { return fn_(x); }
  double derivative(double x, int order) const;
  const std::optional<Expr>& expr() const { return expr_; }
  const std::string& label() const { return label_; }

 private:
  std::function<double(double)> fn_;
  std::optional<Expr> expr_;
  std::string label_;
};

}  // namespace trf
