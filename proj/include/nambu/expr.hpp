#pragma once

// Scalar field expressions: recursive-descent parser over {+,-,*,/,^, sin,
// cos, exp, log, pi} and an evaluator that carries exact first derivatives
// via forward-mode (dual number) arithmetic.

#include <array>
#include <charconv>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nambu/errors.hpp"

namespace nambu {

enum class DomainKind { sphere2, torus2, torus3 };

inline std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::sphere2: return "sphere2";
    case DomainKind::torus2: return "torus2";
    case DomainKind::torus3: return "torus3";
  }
  return "?";
}

// Ambient coordinates expressions may reference. The sphere uses the unit
// round sphere in 3-space, the tori use flat periodic coordinates.
inline const std::vector<std::string>& coordinate_names(DomainKind k) {
  static const std::vector<std::string> xyz{"x", "y", "z"};
  static const std::vector<std::string> xy{"x", "y"};
  return k == DomainKind::torus2 ? xy : xyz;
}

struct ValueGrad {
  double value = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  int dim = 0;
};

class Expression {
 public:
  enum class Op { num, var, add, sub, mul, div, pow, neg, sin, cos, exp, log };

  struct Node {
    Op op;
    double value = 0.0;  // Op::num
    int var = -1;        // Op::var, index into variables()
    int a = -1;
    int b = -1;
  };

  Expression() = default;
  Expression(std::vector<Node> nodes, int root, std::vector<std::string> vars)
      : nodes_(std::move(nodes)), root_(root), vars_(std::move(vars)) {}

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  const std::vector<std::string>& variables() const { return vars_; }
  bool empty() const { return root_ < 0; }

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> vars_;
};

namespace expr_detail {

constexpr double kPi = 3.14159265358979323846;

struct Token {
  enum class Kind { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Kind kind;
  double num = 0.0;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    Token t;
    t.pos = i_;
    if (i_ >= src_.size()) {
      t.kind = Token::Kind::end;
      return t;
    }
    char c = src_[i_];
    switch (c) {
      case '+': t.kind = Token::Kind::plus; ++i_; return t;
      case '-': t.kind = Token::Kind::minus; ++i_; return t;
      case '*': t.kind = Token::Kind::star; ++i_; return t;
      case '/': t.kind = Token::Kind::slash; ++i_; return t;
      case '^': t.kind = Token::Kind::caret; ++i_; return t;
      case '(': t.kind = Token::Kind::lparen; ++i_; return t;
      case ')': t.kind = Token::Kind::rparen; ++i_; return t;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = i_;
      while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) ++i_;
      if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
        std::size_t save = i_;
        ++i_;
        if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
        if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        } else {
          i_ = save;  // bare 'e' belongs to the next token
        }
      }
      std::string_view body = src_.substr(start, i_ - start);
      double v = 0.0;
      auto res = std::from_chars(body.data(), body.data() + body.size(), v);
      if (res.ec != std::errc() || res.ptr != body.data() + body.size())
        throw SyntaxError(start, "a numeric literal");
      t.kind = Token::Kind::number;
      t.num = v;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        ++i_;
      t.kind = Token::Kind::ident;
      t.text = std::string(src_.substr(start, i_ - start));
      return t;
    }
    throw SyntaxError(i_, "an operator, number, or name");
  }

 private:
  std::string_view src_;
  std::size_t i_ = 0;
};

class Parser {
 public:
  Parser(std::string_view src, std::vector<std::string> vars)
      : lex_(src), vars_(std::move(vars)) {
    cur_ = lex_.next();
  }

  Expression run() {
    int root = parse_sum();
    expect(Token::Kind::end, "end of input");
    return Expression(std::move(nodes_), root, std::move(vars_));
  }

 private:
  using Op = Expression::Op;

  void advance() { cur_ = lex_.next(); }

  void expect(Token::Kind k, const std::string& what) {
    if (cur_.kind != k) throw SyntaxError(cur_.pos, what);
    advance();
  }

  int make(Expression::Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_sum() {
    int lhs = parse_term();
    while (cur_.kind == Token::Kind::plus || cur_.kind == Token::Kind::minus) {
      Op op = cur_.kind == Token::Kind::plus ? Op::add : Op::sub;
      advance();
      int rhs = parse_term();
      lhs = make({op, 0.0, -1, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_unary();
    while (cur_.kind == Token::Kind::star || cur_.kind == Token::Kind::slash) {
      Op op = cur_.kind == Token::Kind::star ? Op::mul : Op::div;
      advance();
      int rhs = parse_unary();
      lhs = make({op, 0.0, -1, lhs, rhs});
    }
    return lhs;
  }

  // '^' binds tighter than unary minus and associates to the right.
  int parse_unary() {
    if (cur_.kind == Token::Kind::minus) {
      advance();
      int a = parse_unary();
      return make({Op::neg, 0.0, -1, a, -1});
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_atom();
    if (cur_.kind == Token::Kind::caret) {
      advance();
      int exponent = parse_unary();
      return make({Op::pow, 0.0, -1, base, exponent});
    }
    return base;
  }

  int parse_atom() {
    if (cur_.kind == Token::Kind::number) {
      double v = cur_.num;
      advance();
      return make({Op::num, v, -1, -1, -1});
    }
    if (cur_.kind == Token::Kind::lparen) {
      advance();
      int inner = parse_sum();
      expect(Token::Kind::rparen, "')'");
      return inner;
    }
    if (cur_.kind == Token::Kind::ident) {
      std::string name = cur_.text;
      advance();
      if (cur_.kind == Token::Kind::lparen) {
        advance();
        int arg = parse_sum();
        expect(Token::Kind::rparen, "')'");
        Op op;
        if (name == "sin") op = Op::sin;
        else if (name == "cos") op = Op::cos;
        else if (name == "exp") op = Op::exp;
        else if (name == "log") op = Op::log;
        else throw UnknownFunction(name);
        return make({op, 0.0, -1, arg, -1});
      }
      if (name == "pi") return make({Op::num, kPi, -1, -1, -1});
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name)
          return make({Op::var, 0.0, static_cast<int>(i), -1, -1});
      }
      std::string allowed;
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (i) allowed += ", ";
        allowed += vars_[i];
      }
      throw UnknownVariable(name, allowed);
    }
    throw SyntaxError(cur_.pos, "an expression");
  }

  Lexer lex_;
  Token cur_;
  std::vector<Expression::Node> nodes_;
  std::vector<std::string> vars_;
};

struct Dual {
  double v = 0.0;
  std::array<double, 3> g{0.0, 0.0, 0.0};
};

inline bool integral_exponent(double e, long long& out) {
  if (!std::isfinite(e) || std::abs(e) > 64.0) return false;
  long long n = static_cast<long long>(std::llround(e));
  if (static_cast<double>(n) != e) return false;
  out = n;
  return true;
}

inline double ipow(double b, long long n) {
  if (n < 0) return 1.0 / ipow(b, -n);
  double r = 1.0, p = b;
  while (n > 0) {
    if (n & 1) r *= p;
    p *= p;
    n >>= 1;
  }
  return r;
}

inline Dual eval_node(const Expression& e, int idx, std::span<const double> p, int dim) {
  const Expression::Node& n = e.nodes()[idx];
  using Op = Expression::Op;
  Dual r;
  switch (n.op) {
    case Op::num:
      r.v = n.value;
      return r;
    case Op::var:
      r.v = p[n.var];
      r.g[n.var] = 1.0;
      return r;
    case Op::neg: {
      Dual a = eval_node(e, n.a, p, dim);
      r.v = -a.v;
      for (int i = 0; i < dim; ++i) r.g[i] = -a.g[i];
      return r;
    }
    case Op::add: {
      Dual a = eval_node(e, n.a, p, dim), b = eval_node(e, n.b, p, dim);
      r.v = a.v + b.v;
      for (int i = 0; i < dim; ++i) r.g[i] = a.g[i] + b.g[i];
      return r;
    }
    case Op::sub: {
      Dual a = eval_node(e, n.a, p, dim), b = eval_node(e, n.b, p, dim);
      r.v = a.v - b.v;
      for (int i = 0; i < dim; ++i) r.g[i] = a.g[i] - b.g[i];
      return r;
    }
    case Op::mul: {
      Dual a = eval_node(e, n.a, p, dim), b = eval_node(e, n.b, p, dim);
      r.v = a.v * b.v;
      for (int i = 0; i < dim; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
      return r;
    }
    case Op::div: {
      Dual a = eval_node(e, n.a, p, dim), b = eval_node(e, n.b, p, dim);
      if (b.v == 0.0) throw EvalDomainError("division by zero during evaluation");
      r.v = a.v / b.v;
      double inv2 = 1.0 / (b.v * b.v);
      for (int i = 0; i < dim; ++i) r.g[i] = (a.g[i] * b.v - a.v * b.g[i]) * inv2;
      return r;
    }
    case Op::pow: {
      Dual a = eval_node(e, n.a, p, dim);
      const Expression::Node& eb = e.nodes()[n.b];
      long long k;
      if (eb.op == Op::num && integral_exponent(eb.value, k)) {
        r.v = ipow(a.v, k);
        if (k != 0) {
          if (a.v == 0.0 && k < 0)
            throw EvalDomainError("zero raised to a negative power");
          double d = static_cast<double>(k) * ipow(a.v, k - 1);
          for (int i = 0; i < dim; ++i) r.g[i] = d * a.g[i];
        }
        return r;
      }
      Dual b = eval_node(e, n.b, p, dim);
      if (a.v <= 0.0)
        throw EvalDomainError("non-integer power of a non-positive base");
      r.v = std::pow(a.v, b.v);
      double la = std::log(a.v);
      for (int i = 0; i < dim; ++i)
        r.g[i] = r.v * (b.g[i] * la + b.v * a.g[i] / a.v);
      return r;
    }
    case Op::sin: {
      Dual a = eval_node(e, n.a, p, dim);
      r.v = std::sin(a.v);
      double c = std::cos(a.v);
      for (int i = 0; i < dim; ++i) r.g[i] = c * a.g[i];
      return r;
    }
    case Op::cos: {
      Dual a = eval_node(e, n.a, p, dim);
      r.v = std::cos(a.v);
      double s = -std::sin(a.v);
      for (int i = 0; i < dim; ++i) r.g[i] = s * a.g[i];
      return r;
    }
    case Op::exp: {
      Dual a = eval_node(e, n.a, p, dim);
      r.v = std::exp(a.v);
      for (int i = 0; i < dim; ++i) r.g[i] = r.v * a.g[i];
      return r;
    }
    case Op::log: {
      Dual a = eval_node(e, n.a, p, dim);
      if (a.v <= 0.0) throw EvalDomainError("log of a non-positive argument");
      r.v = std::log(a.v);
      for (int i = 0; i < dim; ++i) r.g[i] = a.g[i] / a.v;
      return r;
    }
  }
  throw Error("corrupt expression node");
}

inline double eval_node_value(const Expression& e, int idx, std::span<const double> p) {
  const Expression::Node& n = e.nodes()[idx];
  using Op = Expression::Op;
  switch (n.op) {
    case Op::num: return n.value;
    case Op::var: return p[n.var];
    case Op::neg: return -eval_node_value(e, n.a, p);
    case Op::add: return eval_node_value(e, n.a, p) + eval_node_value(e, n.b, p);
    case Op::sub: return eval_node_value(e, n.a, p) - eval_node_value(e, n.b, p);
    case Op::mul: return eval_node_value(e, n.a, p) * eval_node_value(e, n.b, p);
    case Op::div: {
      double a = eval_node_value(e, n.a, p), b = eval_node_value(e, n.b, p);
      if (b == 0.0) throw EvalDomainError("division by zero during evaluation");
      return a / b;
    }
    case Op::pow: {
      double a = eval_node_value(e, n.a, p);
      const Expression::Node& eb = e.nodes()[n.b];
      long long k;
      if (eb.op == Op::num && integral_exponent(eb.value, k)) {
        if (a == 0.0 && k < 0)
          throw EvalDomainError("zero raised to a negative power");
        return ipow(a, k);
      }
      double b = eval_node_value(e, n.b, p);
      if (a <= 0.0)
        throw EvalDomainError("non-integer power of a non-positive base");
      return std::pow(a, b);
    }
    case Op::sin: return std::sin(eval_node_value(e, n.a, p));
    case Op::cos: return std::cos(eval_node_value(e, n.a, p));
    case Op::exp: return std::exp(eval_node_value(e, n.a, p));
    case Op::log: {
      double a = eval_node_value(e, n.a, p);
      if (a <= 0.0) throw EvalDomainError("log of a non-positive argument");
      return std::log(a);
    }
  }
  throw Error("corrupt expression node");
}

inline std::string format_number(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline int precedence(Expression::Op op) {
  using Op = Expression::Op;
  switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    case Op::neg: return 3;
    case Op::pow: return 4;
    default: return 5;
  }
}

inline void print_node(const Expression& e, int idx, std::string& out) {
  const Expression::Node& n = e.nodes()[idx];
  using Op = Expression::Op;
  auto child = [&](int c, bool parens) {
    if (parens) out += '(';
    print_node(e, c, out);
    if (parens) out += ')';
  };
  int mine = precedence(n.op);
  switch (n.op) {
    case Op::num:
      out += format_number(n.value);
      return;
    case Op::var:
      out += e.variables()[n.var];
      return;
    case Op::neg: {
      out += '-';
      const Expression::Node& a = e.nodes()[n.a];
      child(n.a, precedence(a.op) < mine || a.op == Op::neg);
      return;
    }
    case Op::add:
    case Op::sub: {
      child(n.a, precedence(e.nodes()[n.a].op) < mine);
      out += n.op == Op::add ? " + " : " - ";
      child(n.b, precedence(e.nodes()[n.b].op) <= mine);
      return;
    }
    case Op::mul:
    case Op::div: {
      child(n.a, precedence(e.nodes()[n.a].op) < mine);
      out += n.op == Op::mul ? "*" : "/";
      child(n.b, precedence(e.nodes()[n.b].op) <= mine);
      return;
    }
    case Op::pow: {
      child(n.a, precedence(e.nodes()[n.a].op) <= mine);
      out += '^';
      child(n.b, precedence(e.nodes()[n.b].op) < mine);
      return;
    }
    case Op::sin: out += "sin("; break;
    case Op::cos: out += "cos("; break;
    case Op::exp: out += "exp("; break;
    case Op::log: out += "log("; break;
  }
  print_node(e, n.a, out);
  out += ')';
}

}  // namespace expr_detail

inline Expression parse(std::string_view text, std::vector<std::string> variables) {
  if (text.empty()) throw SyntaxError(0, "a non-empty expression");
  return expr_detail::Parser(text, std::move(variables)).run();
}

inline Expression parse(std::string_view text, DomainKind kind) {
  return parse(text, coordinate_names(kind));
}

inline ValueGrad eval_with_gradient(const Expression& e, std::span<const double> point) {
  int dim = static_cast<int>(e.variables().size());
  if (static_cast<int>(point.size()) != dim)
    throw ValidationError("evaluation point has dimension " +
                          std::to_string(point.size()) + ", expression expects " +
                          std::to_string(dim));
  expr_detail::Dual d = expr_detail::eval_node(e, e.root(), point, dim);
  ValueGrad vg;
  vg.value = d.v;
  vg.grad = d.g;
  vg.dim = dim;
  return vg;
}

inline double eval_value(const Expression& e, std::span<const double> point) {
  if (point.size() != e.variables().size())
    throw ValidationError("evaluation point dimension mismatch");
  return expr_detail::eval_node_value(e, e.root(), point);
}

inline std::string to_string(const Expression& e) {
  std::string out;
  expr_detail::print_node(e, e.root(), out);
  return out;
}

}  // namespace nambu
