#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "jet.hpp"

namespace instanton {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sqrt, Cbrt, Sin, Cos, Integral };

struct Node;

/// Immutable expression DAG over four coordinate variables.
class Expr {
 public:
  Expr() : Expr(0.0) {}
  Expr(double v);  // NOLINT
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Expr variable(int i);

  const Node& operator*() const { return *node_; }
  const Node* operator->() const { return node_.get(); }
  const Node* get() const { return node_.get(); }

  bool is_const() const;
  bool is_const(double v) const;

 private:
  std::shared_ptr<const Node> node_;
};

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // constant, exponent, or lower limit
  int var = -1;
  Expr a{nullptr}, b{nullptr};  // for Integral: integrand, upper limit
};

namespace detail {
inline Expr make(Op op, Expr a = Expr(nullptr), Expr b = Expr(nullptr), double value = 0.0, int var = -1) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  n->value = value;
  n->var = var;
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}
}  // namespace detail

inline Expr::Expr(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  node_ = std::move(n);
}

inline Expr Expr::variable(int i) { return detail::make(Op::Var, Expr(nullptr), Expr(nullptr), 0.0, i); }
inline bool Expr::is_const() const { return node_ && node_->op == Op::Const; }
inline bool Expr::is_const(double v) const { return is_const() && node_->value == v; }

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return a->value + b->value;
  if (a.is_const(0)) return b;
  if (b.is_const(0)) return a;
  return detail::make(Op::Add, a, b);
}
inline Expr operator-(const Expr& a) {
  if (a.is_const()) return -a->value;
  if (a->op == Op::Neg) return a->a;
  return detail::make(Op::Neg, a);
}
inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return a->value - b->value;
  if (b.is_const(0)) return a;
  if (a.is_const(0)) return -b;
  return detail::make(Op::Sub, a, b);
}
inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return a->value * b->value;
  if (a.is_const(0) || b.is_const(0)) return 0.0;
  if (a.is_const(1)) return b;
  if (b.is_const(1)) return a;
  if (a.is_const(-1)) return -b;
  if (b.is_const(-1)) return -a;
  return detail::make(Op::Mul, a, b);
}
inline Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return a->value / b->value;
  if (a.is_const(0)) return 0.0;
  if (b.is_const(1)) return a;
  return detail::make(Op::Div, a, b);
}
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr pow(const Expr& a, double p) {
  if (p == 0) return 1.0;
  if (p == 1) return a;
  if (a.is_const()) return std::pow(a->value, p);
  return detail::make(Op::Pow, a, Expr(nullptr), p);
}

#define INSTANTON_UNARY(fn, OP)                          \
  inline Expr fn(const Expr& a) {                        \
    if (a.is_const()) return std::fn(a->value);          \
    return detail::make(Op::OP, a);                      \
  }
INSTANTON_UNARY(exp, Exp)
INSTANTON_UNARY(log, Log)
INSTANTON_UNARY(sqrt, Sqrt)
INSTANTON_UNARY(cbrt, Cbrt)
INSTANTON_UNARY(sin, Sin)
INSTANTON_UNARY(cos, Cos)
#undef INSTANTON_UNARY

/// Integral of `integrand` in variable `var` from the constant `lower` to `upper`.
/// Inside the integrand `var` is bound; the other variables are free.
inline Expr integral(const Expr& integrand, int var, double lower, const Expr& upper) {
  if (integrand.is_const(0)) return 0.0;
  return detail::make(Op::Integral, integrand, upper, lower, var);
}

/// Gauss-Legendre rule on [0, 1].
template <int N>
const std::pair<std::array<double, N>, std::array<double, N>>& gauss_legendre() {
  static const auto rule = [] {
    std::pair<std::array<double, N>, std::array<double, N>> r;
    for (int i = 0; i < N; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = x;
        for (int k = 2; k <= N; ++k) {
          double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = N * (x * p1 - p0) / (x * x - 1);
        double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.first[i] = 0.5 * (1 - x);
      r.second[i] = 1.0 / ((1 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

constexpr int kQuadratureNodes = 32;

template <class T>
class Evaluator {
 public:
  explicit Evaluator(const std::array<T, 4>& x) : x_(x) {}

  T operator()(const Expr& e) { return eval(e.get()); }

 private:
  T eval(const Node* n) {
    switch (n->op) {
      case Op::Const:
        return T(n->value);
      case Op::Var:
        return x_[n->var];
      default:
        break;
    }
    auto it = cache_.find(n);
    if (it != cache_.end()) return it->second;
    T r = compute(n);
    cache_.emplace(n, r);
    return r;
  }

  T compute(const Node* n) {
    switch (n->op) {
      case Op::Add:
        return eval(n->a.get()) + eval(n->b.get());
      case Op::Sub:
        return eval(n->a.get()) - eval(n->b.get());
      case Op::Mul:
        return eval(n->a.get()) * eval(n->b.get());
      case Op::Div:
        return eval(n->a.get()) / eval(n->b.get());
      case Op::Neg:
        return -eval(n->a.get());
      case Op::Pow: {
        T a = eval(n->a.get());
        double p = n->value;
        if (p == 2) return a * a;
        if (p == -1) return T(1.0) / a;
        if (p == -2) return T(1.0) / (a * a);
        return pow(a, p);
      }
      case Op::Exp:
        return exp(eval(n->a.get()));
      case Op::Log:
        return log(eval(n->a.get()));
      case Op::Sqrt:
        return sqrt(eval(n->a.get()));
      case Op::Cbrt:
        return cbrt(eval(n->a.get()));
      case Op::Sin:
        return sin(eval(n->a.get()));
      case Op::Cos:
        return cos(eval(n->a.get()));
      case Op::Integral: {
        const auto& [nodes, weights] = gauss_legendre<kQuadratureNodes>();
        T upper = eval(n->b.get());
        T span = upper - n->value;
        T sum(0.0);
        for (int k = 0; k < kQuadratureNodes; ++k) {
          std::array<T, 4> y = x_;
          y[n->var] = span * nodes[k] + n->value;
          sum += Evaluator<T>(y)(n->a) * weights[k];
        }
        return span * sum;
      }
      default:
        return T(0.0);
    }
  }

  std::array<T, 4> x_;
  std::unordered_map<const Node*, T> cache_;
};

template <class T>
T evaluate(const Expr& e, const std::array<T, 4>& x) {
  return Evaluator<T>(x)(e);
}

inline double evaluate(const Expr& e, const std::array<double, 4>& x) { return Evaluator<double>(x)(e); }

/// Replace variable `var` by `repl`. `repl` must not mention a variable bound by an
/// enclosing integral other than `var` itself.
inline Expr substitute(const Expr& e, int var, const Expr& repl) {
  std::unordered_map<const Node*, Expr> memo;
  auto rec = [&](auto&& self, const Expr& x) -> Expr {
    const Node* n = x.get();
    if (n->op == Op::Const) return x;
    if (n->op == Op::Var) return n->var == var ? repl : x;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    Expr r;
    switch (n->op) {
      case Op::Add: r = self(self, n->a) + self(self, n->b); break;
      case Op::Sub: r = self(self, n->a) - self(self, n->b); break;
      case Op::Mul: r = self(self, n->a) * self(self, n->b); break;
      case Op::Div: r = self(self, n->a) / self(self, n->b); break;
      case Op::Neg: r = -self(self, n->a); break;
      case Op::Pow: r = pow(self(self, n->a), n->value); break;
      case Op::Exp: r = exp(self(self, n->a)); break;
      case Op::Log: r = log(self(self, n->a)); break;
      case Op::Sqrt: r = sqrt(self(self, n->a)); break;
      case Op::Cbrt: r = cbrt(self(self, n->a)); break;
      case Op::Sin: r = sin(self(self, n->a)); break;
      case Op::Cos: r = cos(self(self, n->a)); break;
      case Op::Integral: {
        Expr body = n->var == var ? n->a : substitute(n->a, var, repl);
        r = integral(body, n->var, n->value, self(self, n->b));
        break;
      }
      default: r = x;
    }
    memo.emplace(n, r);
    return r;
  };
  return rec(rec, e);
}

/// Symbolic partial derivative in variable `var`.
inline Expr differentiate(const Expr& e, int var) {
  std::unordered_map<const Node*, Expr> memo;
  auto rec = [&](auto&& self, const Expr& x) -> Expr {
    const Node* n = x.get();
    if (n->op == Op::Const) return 0.0;
    if (n->op == Op::Var) return n->var == var ? 1.0 : 0.0;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    Expr r;
    switch (n->op) {
      case Op::Add: r = self(self, n->a) + self(self, n->b); break;
      case Op::Sub: r = self(self, n->a) - self(self, n->b); break;
      case Op::Mul: r = self(self, n->a) * n->b + n->a * self(self, n->b); break;
      case Op::Div: {
        Expr da = self(self, n->a), db = self(self, n->b);
        r = da / n->b - n->a * db / pow(n->b, 2);
        break;
      }
      case Op::Neg: r = -self(self, n->a); break;
      case Op::Pow: r = n->value * pow(n->a, n->value - 1) * self(self, n->a); break;
      case Op::Exp: r = x * self(self, n->a); break;
      case Op::Log: r = self(self, n->a) / n->a; break;
      case Op::Sqrt: r = self(self, n->a) / (2.0 * x); break;
      case Op::Cbrt: r = self(self, n->a) / (3.0 * pow(x, 2)); break;
      case Op::Sin: r = cos(n->a) * self(self, n->a); break;
      case Op::Cos: r = -(sin(n->a) * self(self, n->a)); break;
      case Op::Integral: {
        Expr boundary = substitute(n->a, n->var, n->b) * self(self, n->b);
        if (n->var != var) boundary = boundary + integral(differentiate(n->a, var), n->var, n->value, n->b);
        r = boundary;
        break;
      }
      default: r = 0.0;
    }
    memo.emplace(n, r);
    return r;
  };
  return rec(rec, e);
}

inline std::string to_string(const Expr& e, const std::array<std::string, 4>& names = {"x0", "x1", "x2", "x3"}) {
  std::ostringstream os;
  os.precision(17);
  auto rec = [&](auto&& self, const Node* n) -> void {
    switch (n->op) {
      case Op::Const: os << n->value; return;
      case Op::Var: os << names[n->var]; return;
      case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
        const char* sym = n->op == Op::Add ? " + " : n->op == Op::Sub ? " - " : n->op == Op::Mul ? "*" : "/";
        os << '(';
        self(self, n->a.get());
        os << sym;
        self(self, n->b.get());
        os << ')';
        return;
      }
      case Op::Neg: os << "(-"; self(self, n->a.get()); os << ')'; return;
      case Op::Pow: os << '('; self(self, n->a.get()); os << ")^" << n->value; return;
      case Op::Integral:
        os << "int(";
        self(self, n->a.get());
        os << ", " << names[n->var] << ", " << n->value << ", ";
        self(self, n->b.get());
        os << ')';
        return;
      default: break;
    }
    const char* fn = n->op == Op::Exp ? "exp" : n->op == Op::Log ? "log" : n->op == Op::Sqrt ? "sqrt"
                   : n->op == Op::Cbrt ? "cbrt" : n->op == Op::Sin ? "sin" : "cos";
    os << fn << '(';
    self(self, n->a.get());
    os << ')';
  };
  rec(rec, e.get());
  return os.str();
}

/// Parses arithmetic with + - * / ^, unary minus, pi, e, and
/// exp log sqrt cbrt sin cos tan. Exponents must be constant.
class ExprParser {
 public:
  ExprParser(std::string text, std::vector<std::pair<std::string, int>> names)
      : s_(std::move(text)), names_(std::move(names)) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("expression: " + what + " at position " + std::to_string(i_));
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  Expr sum() {
    Expr e = product();
    for (;;) {
      if (eat('+')) e = e + product();
      else if (eat('-')) e = e - product();
      else return e;
    }
  }
  Expr product() {
    Expr e = unary();
    for (;;) {
      if (eat('*')) e = e * unary();
      else if (eat('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (eat('^')) {
      Expr ex = unary();
      if (!ex.is_const()) fail("exponent must be constant");
      return pow(base, ex->value);
    }
    return base;
  }
  Expr primary() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    char c = s_[i_];
    if (eat('(')) {
      Expr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(i_), &used);
      i_ += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      std::string id = s_.substr(i_, j - i_);
      i_ = j;
      for (const auto& [name, idx] : names_)
        if (name == id) return Expr::variable(idx);
      if (id == "pi") return std::numbers::pi;
      if (id == "e") return std::numbers::e;
      if (!eat('(')) fail("unknown identifier '" + id + "'");
      Expr arg = sum();
      if (!eat(')')) fail("expected ')'");
      if (id == "exp") return exp(arg);
      if (id == "log") return log(arg);
      if (id == "sqrt") return sqrt(arg);
      if (id == "cbrt") return cbrt(arg);
      if (id == "sin") return sin(arg);
      if (id == "cos") return cos(arg);
      if (id == "tan") return sin(arg) / cos(arg);
      fail("unknown function '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::vector<std::pair<std::string, int>> names_;
  std::size_t i_ = 0;
};

inline Expr parse_expr(const std::string& text, const std::vector<std::pair<std::string, int>>& names) {
  return ExprParser(text, names).parse();
}

}  // namespace instanton
