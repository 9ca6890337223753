#include "lorlab/expr.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "lorlab/errors.hpp"

using namespace lorlab;

namespace {
const std::vector<std::string> kTX = {"t", "x"};

double ev(const std::string& s, double t, double x) {
  const double pt[2] = {t, x};
  return parse_expression(s, kTX)->eval(pt);
}
}  // namespace

TEST_CASE("expression parser: arithmetic and precedence") {
  CHECK(ev("1+2*3", 0, 0) == doctest::Approx(7.0));
  CHECK(ev("(1+2)*3", 0, 0) == doctest::Approx(9.0));
  CHECK(ev("2^3^2", 0, 0) == doctest::Approx(512.0));  // right-assoc
  CHECK(ev("-2^2", 0, 0) == doctest::Approx(-4.0));    // unary minus binds loosely
  CHECK(ev("2^-1", 0, 0) == doctest::Approx(0.5));
  CHECK(ev("6/3/2", 0, 0) == doctest::Approx(1.0));
  CHECK(ev("1 - 2 - 3", 0, 0) == doctest::Approx(-4.0));
  CHECK(ev("pi", 0, 0) == doctest::Approx(3.14159265358979323846));
  CHECK(ev("t - x", 2.5, 1.0) == doctest::Approx(1.5));
}

TEST_CASE("expression parser: functions") {
  CHECK(ev("sin(t)", 0.7, 0) == doctest::Approx(std::sin(0.7)));
  CHECK(ev("cosh(t)^2", 0.3, 0) == doctest::Approx(std::cosh(0.3) * std::cosh(0.3)));
  CHECK(ev("exp(log(t))", 2.5, 0) == doctest::Approx(2.5));
  CHECK(ev("sqrt(t^2+x^2)", 3, 4) == doctest::Approx(5.0));
  CHECK(ev("tanh(t)*cos(x)+sinh(0)", 0.2, 0.1) ==
        doctest::Approx(std::tanh(0.2) * std::cos(0.1)));
}

TEST_CASE("expression parser: errors carry position") {
  CHECK_THROWS_AS(parse_expression("t +", kTX), ConfigError);
  CHECK_THROWS_AS(parse_expression("foo(t)", kTX), ConfigError);
  CHECK_THROWS_AS(parse_expression("(t", kTX), ConfigError);
  CHECK_THROWS_AS(parse_expression("t @ x", kTX), ConfigError);
  CHECK_THROWS_AS(parse_expression("sin t", kTX), ConfigError);
}

TEST_CASE("first-order jets differentiate expressions") {
  // f(t,x) = cosh(t)^2 * sin(x);  df/dt = 2 cosh t sinh t sin x, df/dx = cosh^2 t cos x
  auto e = parse_expression("cosh(t)^2 * sin(x)", kTX);
  const double t = 0.8, x = 0.45;
  Jet1 args[2] = {Jet1::variable(t, 0, 2), Jet1::variable(x, 1, 2)};
  Jet1 r = e->eval1(args);
  CHECK(r.v == doctest::Approx(std::cosh(t) * std::cosh(t) * std::sin(x)));
  CHECK(r.g[0] == doctest::Approx(2 * std::cosh(t) * std::sinh(t) * std::sin(x)));
  CHECK(r.g[1] == doctest::Approx(std::cosh(t) * std::cosh(t) * std::cos(x)));
}

TEST_CASE("second-order jets produce exact hessians") {
  // f = cosh(t)^2: f'' = 2 cosh(2t); f = t^2*x: f_tt = 2x, f_tx = 2t, f_xx = 0
  const double t = 1.0, x = -0.3;
  Jet2 args[2] = {Jet2::variable(t, 0, 2), Jet2::variable(x, 1, 2)};

  auto e1 = parse_expression("cosh(t)^2", kTX);
  Jet2 r1 = e1->eval2(args);
  CHECK(r1.hess(0, 0) == doctest::Approx(2 * std::cosh(2 * t)));
  CHECK(r1.hess(1, 1) == doctest::Approx(0.0));

  auto e2 = parse_expression("t^2 * x", kTX);
  Jet2 r2 = e2->eval2(args);
  CHECK(r2.v == doctest::Approx(t * t * x));
  CHECK(r2.g[0] == doctest::Approx(2 * t * x));
  CHECK(r2.g[1] == doctest::Approx(t * t));
  CHECK(r2.hess(0, 0) == doctest::Approx(2 * x));
  CHECK(r2.hess(0, 1) == doctest::Approx(2 * t));
  CHECK(r2.hess(1, 1) == doctest::Approx(0.0));

  auto e3 = parse_expression("exp(t*x) / (1 + t^2)", kTX);
  Jet2 r3 = e3->eval2(args);
  // FD cross-check of the hessian with step 1e-5
  auto f = [&](double a, double b) {
    const double pt[2] = {a, b};
    return e3->eval(pt);
  };
  const double h = 1e-5;
  const double ftt = (f(t + h, x) - 2 * f(t, x) + f(t - h, x)) / (h * h);
  const double ftx =
      (f(t + h, x + h) - f(t + h, x - h) - f(t - h, x + h) + f(t - h, x - h)) /
      (4 * h * h);
  CHECK(r3.hess(0, 0) == doctest::Approx(ftt).epsilon(1e-5));
  CHECK(r3.hess(0, 1) == doctest::Approx(ftx).epsilon(1e-5));
}

TEST_CASE("fractional and negative powers differentiate") {
  auto e = parse_expression("t^0.5", kTX);
  Jet2 a[2] = {Jet2::variable(4.0, 0, 2), Jet2::variable(0.0, 1, 2)};
  Jet2 r = e->eval2(a);
  CHECK(r.v == doctest::Approx(2.0));
  CHECK(r.g[0] == doctest::Approx(0.25));
  CHECK(r.hess(0, 0) == doctest::Approx(-1.0 / 32.0));

  auto e2 = parse_expression("t^-2", kTX);
  Jet1 b[2] = {Jet1::variable(2.0, 0, 2), Jet1::variable(0.0, 1, 2)};
  Jet1 r2 = e2->eval1(b);
  CHECK(r2.v == doctest::Approx(0.25));
  CHECK(r2.g[0] == doctest::Approx(-0.25));
}
