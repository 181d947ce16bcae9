#include "trf/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <vector>

namespace trf {

struct Expr::Node {
  Kind kind;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Kind = Expr::Kind;

bool is_function(Kind k) {
  return k == Kind::Sin || k == Kind::Cos || k == Kind::Exp || k == Kind::Sech || k == Kind::Tanh ||
         k == Kind::Log;
}

const char* function_name(Kind k) {
  switch (k) {
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Exp: return "exp";
    case Kind::Sech: return "sech";
    case Kind::Tanh: return "tanh";
    case Kind::Log: return "log";
    default: return "";
  }
}

int precedence(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  // shortest representation that still round-trips
  for (int p = 1; p < 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) {
      s = buf;
      break;
    }
  }
  return s;
}

class Parser {
 public:
  explicit Parser(const std::string& t) : text_(t) {}

  Expr parse() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", pos_, 0);
    Expr e = expr();
    skip_ws();
    if (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unbalanced ')'", pos_, 1);
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_, 1);
    }
    return e;
  }

 private:
  const std::string& text_;
  size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = Expr::binary(Kind::Add, e, term());
      else if (accept('-')) e = Expr::binary(Kind::Sub, e, term());
      else return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = Expr::binary(Kind::Mul, e, unary());
      else if (accept('/')) e = Expr::binary(Kind::Div, e, unary());
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return Expr::unary(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::binary(Kind::Pow, base, unary());
    return base;
  }
  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_, 0);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      skip_ws();
      if (!accept(')')) throw ParseError("expected ')'", pos_, pos_ < text_.size() ? 1 : 0);
      return e;
    }
    if (c == ')') throw ParseError("unbalanced ')'", pos_, 1);
    throw ParseError(std::string("unexpected '") + c + "'", pos_, 1);
  }
  Expr number() {
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string tok = text_.substr(start, pos_ - start);
    if (tok == ".") throw ParseError("malformed number", start, 1);
    return Expr::constant(std::strtod(tok.c_str(), nullptr));
  }
  Expr identifier() {
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string name = text_.substr(start, pos_ - start);
    if (name == "x") return Expr::var();
    static const std::pair<const char*, Kind> table[] = {{"sin", Kind::Sin},   {"cos", Kind::Cos},
                                                          {"exp", Kind::Exp},   {"sech", Kind::Sech},
                                                          {"tanh", Kind::Tanh}, {"log", Kind::Log}};
    for (const auto& [fname, kind] : table) {
      if (name != fname) continue;
      skip_ws();
      if (!accept('(')) throw ParseError("expected '(' after " + name, pos_, pos_ < text_.size() ? 1 : 0);
      std::vector<Expr> args;
      const size_t args_start = pos_;
      if (!accept(')')) {
        args.push_back(expr());
        while (accept(',')) args.push_back(expr());
        if (!accept(')')) throw ParseError("expected ')'", pos_, pos_ < text_.size() ? 1 : 0);
      }
      if (args.size() != 1)
        throw ParseError(name + " takes 1 argument, got " + std::to_string(args.size()), args_start,
                         pos_ - args_start);
      return Expr::unary(kind, args[0]);
    }
    throw ParseError("unknown identifier '" + name + "'", start, name.size());
  }
};

}  // namespace

Expr Expr::constant(double c) { return Expr(std::make_shared<Node>(Node{Kind::Const, c, nullptr, nullptr})); }
Expr Expr::var() { return Expr(std::make_shared<Node>(Node{Kind::Var, 0.0, nullptr, nullptr})); }
Expr Expr::unary(Kind k, Expr a) { return Expr(std::make_shared<Node>(Node{k, 0.0, a.node_, nullptr})); }
Expr Expr::binary(Kind k, Expr a, Expr b) { return Expr(std::make_shared<Node>(Node{k, 0.0, a.node_, b.node_})); }

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
Expr Expr::lhs() const { return Expr(node_->a); }
Expr Expr::rhs() const { return Expr(node_->b); }

double Expr::eval(double x) const { return eval_node(*node_, x); }

double Expr::eval_node(const Node& n, double x) {
  auto A = [&] { return eval_node(*n.a, x); };
  auto B = [&] { return eval_node(*n.b, x); };
  switch (n.kind) {
    case Kind::Const: return n.value;
    case Kind::Var: return x;
    case Kind::Neg: return -A();
    case Kind::Add: return A() + B();
    case Kind::Sub: return A() - B();
    case Kind::Mul: return A() * B();
    case Kind::Div: {
      double den = B();
      if (den == 0.0) throw EvalError("division by zero");
      return A() / den;
    }
    case Kind::Pow: {
      double base = A(), e = B();
      double r = std::pow(base, e);
      if (std::isnan(r)) throw EvalError("power of a negative base with non-integer exponent");
      return r;
    }
    case Kind::Sin: return std::sin(A());
    case Kind::Cos: return std::cos(A());
    case Kind::Exp: return std::exp(A());
    case Kind::Sech: return 1.0 / std::cosh(A());
    case Kind::Tanh: return std::tanh(A());
    case Kind::Log: {
      double a = A();
      if (!(a > 0.0)) throw EvalError("log of a non-positive value");
      return std::log(a);
    }
  }
  return 0.0;
}

// Folding constructors used by derivative().
Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() + b.value());
  if (a.is_const() && a.value() == 0.0) return b;
  if (b.is_const() && b.value() == 0.0) return a;
  return Expr::binary(Expr::Kind::Add, a, b);
}
Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() - b.value());
  if (b.is_const() && b.value() == 0.0) return a;
  if (a.is_const() && a.value() == 0.0) return -b;
  return Expr::binary(Expr::Kind::Sub, a, b);
}
Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() * b.value());
  if ((a.is_const() && a.value() == 0.0) || (b.is_const() && b.value() == 0.0)) return Expr::constant(0.0);
  if (a.is_const() && a.value() == 1.0) return b;
  if (b.is_const() && b.value() == 1.0) return a;
  return Expr::binary(Expr::Kind::Mul, a, b);
}
Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const() && b.value() != 0.0) return Expr::constant(a.value() / b.value());
  if (a.is_const() && a.value() == 0.0) return Expr::constant(0.0);
  if (b.is_const() && b.value() == 1.0) return a;
  return Expr::binary(Expr::Kind::Div, a, b);
}
Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::Neg) return Expr(a.node_->a);
  return Expr::unary(Expr::Kind::Neg, a);
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& n = *a.node_;
  const auto& m = *b.node_;
  if (n.kind != m.kind) return false;
  if (n.kind == Kind::Const) return n.value == m.value;
  if (n.kind == Kind::Var) return true;
  if (!(Expr(n.a) == Expr(m.a))) return false;
  if (n.b || m.b) return n.b && m.b && Expr(n.b) == Expr(m.b);
  return true;
}

Expr Expr::derivative() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Const: return constant(0.0);
    case Kind::Var: return constant(1.0);
    default: break;
  }
  const Expr a(n.a);
  const Expr da = a.derivative();
  switch (n.kind) {
    case Kind::Neg: return -da;
    case Kind::Add: return da + Expr(n.b).derivative();
    case Kind::Sub: return da - Expr(n.b).derivative();
    case Kind::Mul: {
      const Expr b(n.b);
      return da * b + a * b.derivative();
    }
    case Kind::Div: {
      const Expr b(n.b);
      return (da * b - a * b.derivative()) / binary(Kind::Pow, b, constant(2.0));
    }
    case Kind::Pow: {
      const Expr b(n.b);
      if (b.is_const()) {
        const double p = b.value();
        if (p == 0.0) return constant(0.0);
        Expr lowered = (p == 2.0) ? a : binary(Kind::Pow, a, constant(p - 1.0));
        return constant(p) * lowered * da;
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return *this * (b.derivative() * unary(Kind::Log, a) + b * da / a);
    }
    case Kind::Sin: return unary(Kind::Cos, a) * da;
    case Kind::Cos: return -(unary(Kind::Sin, a) * da);
    case Kind::Exp: return *this * da;
    case Kind::Sech: return -(*this * unary(Kind::Tanh, a) * da);
    case Kind::Tanh: return binary(Kind::Pow, unary(Kind::Sech, a), constant(2.0)) * da;
    case Kind::Log: return da / a;
    default: return constant(0.0);
  }
}

std::string Expr::print() const {
  const Node& n = *node_;
  auto wrap = [](const Expr& e, int need) {
    std::string s = e.print();
    if (precedence(e.kind()) < need || (e.is_const() && e.value() < 0)) return "(" + s + ")";
    return s;
  };
  switch (n.kind) {
    case Kind::Const: return format_number(n.value);
    case Kind::Var: return "x";
    case Kind::Neg: return "-" + wrap(Expr(n.a), 3);
    case Kind::Add: return wrap(Expr(n.a), 1) + " + " + wrap(Expr(n.b), 2);
    case Kind::Sub: return wrap(Expr(n.a), 1) + " - " + wrap(Expr(n.b), 2);
    case Kind::Mul: return wrap(Expr(n.a), 2) + "*" + wrap(Expr(n.b), 3);
    case Kind::Div: return wrap(Expr(n.a), 2) + "/" + wrap(Expr(n.b), 3);
    case Kind::Pow: return wrap(Expr(n.a), 5) + "^" + wrap(Expr(n.b), 3);
    default:
      if (is_function(n.kind)) return std::string(function_name(n.kind)) + "(" + Expr(n.a).print() + ")";
  }
  return "";
}

Expr parse_potential(const std::string& text) { return Parser(text).parse(); }

Potential::Potential(Expr e) : expr_(e), label_(e.print()) {
  fn_ = [e](double x) { return e.eval(x); };
}

Potential::Potential(std::function<double(double)> f, std::string label)
    : fn_(std::move(f)), label_(std::move(label)) {}

double Potential::derivative(double x, int order) const {
  if (order == 0) return fn_(x);
  if (expr_) {
    Expr d = *expr_;
    for (int i = 0; i < order; ++i) d = d.derivative();
    return d.eval(x);
  }
  // Central differences; step balances truncation against rounding for each order.
  const double h = std::pow(2.2e-16, 1.0 / (order + 2)) * std::max(1.0, std::fabs(x));
  switch (order) {
    case 1: return (fn_(x + h) - fn_(x - h)) / (2 * h);
    case 2: return (fn_(x + h) - 2 * fn_(x) + fn_(x - h)) / (h * h);
    case 3: return (fn_(x + 2 * h) - 2 * fn_(x + h) + 2 * fn_(x - h) - fn_(x - 2 * h)) / (2 * h * h * h);
    case 4:
      return (fn_(x + 2 * h) - 4 * fn_(x + h) + 6 * fn_(x) - 4 * fn_(x - h) + fn_(x - 2 * h)) / (h * h * h * h);
    default: throw std::invalid_argument("Potential::derivative: order above 4 needs an expression");
  }
}

}  // namespace trf
