#include "lorlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

#include "lorlab/errors.hpp"

namespace lorlab {

namespace {

// Bring the std overloads into scope before eval_generic so that the
// dependent calls sin(a), cos(a), ... resolve for T = double as well as for
// the jet types (which are found by argument-dependent lookup).
using std::cos;
using std::cosh;
using std::exp;
using std::log;
using std::sin;
using std::sinh;
using std::sqrt;
using std::tanh;

template <class T>
T make_const(double c, std::span<const T> like);

template <>
double make_const<double>(double c, std::span<const double>) {
  return c;
}
template <>
Jet1 make_const<Jet1>(double c, std::span<const Jet1> like) {
  return Jet1::constant(c, like.empty() ? 0 : like[0].n);
}
template <>
Jet2 make_const<Jet2>(double c, std::span<const Jet2> like) {
  return Jet2::constant(c, like.empty() ? 0 : like[0].n);
}

double fpow(double a, double b) { return std::pow(a, b); }
Jet1 fpow(const Jet1& a, const Jet1& b) { return exp(b * log(a)); }
Jet2 fpow(const Jet2& a, const Jet2& b) { return exp(b * log(a)); }

template <class T>
T ipow_eval(const T& base, int k, std::span<const T> like) {
  if (k == 0) return make_const<T>(1.0, like);
  const int m = k < 0 ? -k : k;
  T acc = base;
  for (int i = 1; i < m; ++i) acc = acc * base;
  if (k < 0) return make_const<T>(1.0, like) / acc;
  return acc;
}

template <class T>
T eval_generic(const Expr& e, std::span<const T> x) {
  switch (e.kind) {
    case Expr::Kind::constant:
      return make_const<T>(e.value, x);
    case Expr::Kind::variable:
      return x[static_cast<size_t>(e.var)];
    case Expr::Kind::unary: {
      T a = eval_generic(*e.a, x);
      switch (e.op) {
        case Expr::Op::neg:   return -a;
        case Expr::Op::fsin:  return sin(a);
        case Expr::Op::fcos:  return cos(a);
        case Expr::Op::fsinh: return sinh(a);
        case Expr::Op::fcosh: return cosh(a);
        case Expr::Op::ftanh: return tanh(a);
        case Expr::Op::fexp:  return exp(a);
        case Expr::Op::flog:  return log(a);
        case Expr::Op::fsqrt: return sqrt(a);
        default: break;
      }
      break;
    }
    case Expr::Kind::binary: {
      if (e.op == Expr::Op::pow && e.ipow != 0) {
        T a = eval_generic(*e.a, x);
        return ipow_eval(a, e.ipow, x);
      }
      T a = eval_generic(*e.a, x);
      T b = eval_generic(*e.b, x);
      switch (e.op) {
        case Expr::Op::add: return a + b;
        case Expr::Op::sub: return a - b;
        case Expr::Op::mul: return a * b;
        case Expr::Op::div: return a / b;
        case Expr::Op::pow: return fpow(a, b);
        default: break;
      }
      break;
    }
  }
  throw ConfigError("malformed expression node");
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
  const std::string& text;
  const std::vector<std::string>& coords;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(msg + " at position " + std::to_string(pos) + " in \"" +
                      text + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos != text.size()) fail("unexpected trailing input");
    return e;
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+')) {
        e = binary(Expr::Op::add, e, parse_term());
      } else if (eat('-')) {
        e = binary(Expr::Op::sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (eat('*')) {
        e = binary(Expr::Op::mul, e, parse_factor());
      } else if (eat('/')) {
        e = binary(Expr::Op::div, e, parse_factor());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_factor() {
    if (eat('-')) {
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::unary;
      node->op = Expr::Op::neg;
      node->a = parse_factor();
      return node;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (eat('^')) {
      ExprPtr expo = parse_factor();  // right associative, binds unary minus
      return binary(Expr::Op::pow, base, expo);
    }
    return base;
  }

  ExprPtr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
    if (eat('(')) {
      ExprPtr e = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    const char* start = text.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(start, &end);
    if (end == start) fail("malformed number");
    pos += static_cast<size_t>(end - start);
    return expr_constant(v);
  }

  ExprPtr parse_ident() {
    const size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string name = text.substr(start, pos - start);

    static const std::map<std::string, Expr::Op> funcs = {
        {"sin", Expr::Op::fsin},   {"cos", Expr::Op::fcos},
        {"sinh", Expr::Op::fsinh}, {"cosh", Expr::Op::fcosh},
        {"tanh", Expr::Op::ftanh}, {"exp", Expr::Op::fexp},
        {"log", Expr::Op::flog},   {"sqrt", Expr::Op::fsqrt},
    };
    if (auto it = funcs.find(name); it != funcs.end()) {
      if (!eat('(')) fail("expected '(' after function " + name);
      auto node = std::make_shared<Expr>();
      node->kind = Expr::Kind::unary;
      node->op = it->second;
      node->a = parse_sum();
      if (!eat(')')) fail("expected ')' closing call to " + name);
      return node;
    }
    if (name == "pi") return expr_constant(3.14159265358979323846);
    for (size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] == name) {
        auto node = std::make_shared<Expr>();
        node->kind = Expr::Kind::variable;
        node->var = static_cast<int>(i);
        return node;
      }
    }
    fail("unknown identifier \"" + name + "\"");
  }

  static ExprPtr binary(Expr::Op op, ExprPtr a, ExprPtr b) {
    auto node = std::make_shared<Expr>();
    node->kind = Expr::Kind::binary;
    node->op = op;
    node->a = std::move(a);
    node->b = std::move(b);
    if (op == Expr::Op::pow && node->b->kind == Expr::Kind::constant) {
      const double k = node->b->value;
      const double r = std::round(k);
      if (std::abs(k - r) < 1e-12 && std::abs(r) <= 12.0 && r != 0.0)
        node->ipow = static_cast<int>(r);
    }
    return node;
  }
};

}  // namespace

double Expr::eval(std::span<const double> x) const { return eval_generic(*this, x); }
Jet1 Expr::eval1(std::span<const Jet1> x) const { return eval_generic(*this, x); }
Jet2 Expr::eval2(std::span<const Jet2> x) const { return eval_generic(*this, x); }

ExprPtr expr_constant(double c) {
  auto node = std::make_shared<Expr>();
  node->kind = Expr::Kind::constant;
  node->value = c;
  return node;
}

ExprPtr parse_expression(const std::string& text,
                         const std::vector<std::string>& coords) {
  Parser p{text, coords};
  return p.parse();
}

}  // namespace lorlab
