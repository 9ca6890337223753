#pragma once

// Expression trees for metric components. Charts defined by formulas (both
// the built-ins and user metric-spec files) evaluate these trees on plain
// doubles or on AD jets, which gives exact first and second derivatives of
// every metric component.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lorlab/jet.hpp"

namespace lorlab {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { constant, variable, unary, binary };
  enum class Op {
    none,
    // unary
    neg, fsin, fcos, fsinh, fcosh, ftanh, fexp, flog, fsqrt,
    // binary
    add, sub, mul, div, pow,
  };

  Kind kind = Kind::constant;
  Op op = Op::none;
  double value = 0.0;  // Kind::constant
  int var = -1;        // Kind::variable
  int ipow = 0;        // pow fast path when the exponent is a small integer
  ExprPtr a, b;

  double eval(std::span<const double> x) const;
  Jet1 eval1(std::span<const Jet1> x) const;
  Jet2 eval2(std::span<const Jet2> x) const;
};

ExprPtr expr_constant(double c);

// Parses an arithmetic expression over the named coordinates. Supported:
// + - * / ^ (right-assoc), unary minus, parentheses, numeric literals, "pi",
// and sin cos sinh cosh tanh exp log sqrt. Throws ConfigError with a byte
// position on malformed input or unknown identifiers.
ExprPtr parse_expression(const std::string& text,
                         const std::vector<std::string>& coords);

}  // namespace lorlab
