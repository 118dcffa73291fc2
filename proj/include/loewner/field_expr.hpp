#pragma once

// Tiny arithmetic grammar for vector fields on the command line:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number ['i'] | 'i' | 'z' | 't' | '(' expr ')'
//
// Numbers use decimal notation with an optional exponent; a trailing `i` makes a literal
// imaginary ("2.5i"). Whitespace is ignored. Evaluation carries the z-derivative along.

#include <cctype>
#include <complex>
#include <cstdlib>
#include <memory>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "generators.hpp"
#include "geometry.hpp"

namespace loewner {

/// Value and d/dz of an expression.
struct Dual {
  cd v, d;
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) {
  return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}
inline Dual ipow(Dual a, int n) {
  if (n == 0) return {1.0, 0.0};
  if (n < 0) return Dual{1.0, 0.0} / ipow(a, -n);
  cd p = 1.0;
  for (int k = 0; k < n - 1; ++k) p *= a.v;
  return {p * a.v, static_cast<double>(n) * p * a.d};
}

class FieldExpression {
public:
  static FieldExpression parse(std::string_view text) {
    Parser p{text};
    FieldExpression e;
    e.root_ = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("unexpected character");
    e.source_ = std::string(text);
    e.uses_z_ = p.saw_z;
    e.uses_t_ = p.saw_t;
    return e;
  }

  Dual eval(cd z, double t = 0.0) const { return root_->eval(z, t); }
  cd operator()(cd z, double t = 0.0) const { return eval(z, t).v; }

  bool uses_z() const { return uses_z_; }
  bool uses_t() const { return uses_t_; }
  const std::string &source() const { return source_; }

  /// Autonomous field; expressions mentioning t are rejected.
  FieldSpec as_field() const {
    detail::require(!uses_t_, "field expression depends on t; an autonomous field is required");
    auto root = root_;
    return FieldSpec{[root](cd z) { return root->eval(z, 0.0).v; },
                     [root](cd z) { return root->eval(z, 0.0).d; }};
  }

  TimeFieldSpec as_time_field() const {
    auto root = root_;
    return TimeFieldSpec{[root](cd z, double t) { return root->eval(z, t).v; },
                         [root](cd z, double t) { return root->eval(z, t).d; }};
  }

private:
  struct Node {
    enum class Op { Const, Z, T, Add, Sub, Mul, Div, Neg, Pow } op = Op::Const;
    cd value{0.0, 0.0};
    int exponent = 0;
    std::shared_ptr<const Node> lhs, rhs;

    Dual eval(cd z, double t) const {
      switch (op) {
      case Op::Const:
        return {value, 0.0};
      case Op::Z:
        return {z, 1.0};
      case Op::T:
        return {t, 0.0};
      case Op::Add:
        return lhs->eval(z, t) + rhs->eval(z, t);
      case Op::Sub:
        return lhs->eval(z, t) - rhs->eval(z, t);
      case Op::Mul:
        return lhs->eval(z, t) * rhs->eval(z, t);
      case Op::Div:
        return lhs->eval(z, t) / rhs->eval(z, t);
      case Op::Neg: {
        const Dual a = lhs->eval(z, t);
        return {-a.v, -a.d};
      }
      case Op::Pow:
        return ipow(lhs->eval(z, t), exponent);
      }
      return {0.0, 0.0};
    }
  };
  using NodePtr = std::shared_ptr<const Node>;

  static NodePtr make(Node::Op op, NodePtr l = {}, NodePtr r = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
  }

  struct Parser {
    std::string_view s;
    std::size_t pos = 0;
    bool saw_z = false, saw_t = false;

    [[noreturn]] void fail(const std::string &msg) const {
      throw PreconditionError("field expression: " + msg + " at position " +
                              std::to_string(pos) + " in \"" + std::string(s) + "\"");
    }
    void skip() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
      skip();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    NodePtr expr() {
      NodePtr n = term();
      for (;;) {
        if (eat('+'))
          n = make(Node::Op::Add, n, term());
        else if (eat('-'))
          n = make(Node::Op::Sub, n, term());
        else
          return n;
      }
    }
    NodePtr term() {
      NodePtr n = unary();
      for (;;) {
        if (eat('*'))
          n = make(Node::Op::Mul, n, unary());
        else if (eat('/'))
          n = make(Node::Op::Div, n, unary());
        else
          return n;
      }
    }
    NodePtr unary() {
      if (eat('-')) return make(Node::Op::Neg, unary());
      if (eat('+')) return unary();
      return power();
    }
    NodePtr power() {
      NodePtr base = primary();
      if (!eat('^')) return base;
      skip();
      const bool negative = eat('-');
      skip();
      const std::size_t start = pos;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
      if (start == pos) fail("expected an integer exponent");
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Pow;
      n->exponent = std::stoi(std::string(s.substr(start, pos - start))) * (negative ? -1 : 1);
      n->lhs = std::move(base);
      return n;
    }
    NodePtr primary() {
      skip();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        NodePtr n = expr();
        if (!eat(')')) fail("expected ')'");
        return n;
      }
      if (c == 'z') {
        ++pos;
        saw_z = true;
        return make(Node::Op::Z);
      }
      if (c == 't') {
        ++pos;
        saw_t = true;
        return make(Node::Op::T);
      }
      if (c == 'i') {
        ++pos;
        auto n = std::make_shared<Node>();
        n->value = I;
        return n;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      fail(std::string("unexpected '") + c + "'");
    }
    NodePtr number() {
      const std::string rest(s.substr(pos));
      char *end = nullptr;
      const double x = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("malformed number");
      pos += static_cast<std::size_t>(end - rest.c_str());
      auto n = std::make_shared<Node>();
      n->value = x;
      if (pos < s.size() && s[pos] == 'i') {
        ++pos;
        n->value = cd{0.0, x};
      }
      return n;
    }
  };

  NodePtr root_;
  std::string source_;
  bool uses_z_ = false, uses_t_ = false;
};

/// Parses a constant complex literal such as "0.5+0i", "-1", "i" or "0.3-0.2i".
inline cd parse_complex(std::string_view text) {
  const FieldExpression e = FieldExpression::parse(text);
  detail::require(!e.uses_z() && !e.uses_t(), "complex literal must not mention z or t");
  return e(0.0);
}

} // namespace loewner
