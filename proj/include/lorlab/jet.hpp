#pragma once

// Forward-mode automatic differentiation scalars used to evaluate metric
// expression trees together with their exact first and second derivatives.
// Capacity is fixed (kMaxDim) so evaluation never allocates.

#include <array>
#include <cmath>

#include "lorlab/errors.hpp"

namespace lorlab {

inline constexpr int kMaxDim = 6;  // chart dimension cap for AD evaluation

// ---------------------------------------------------------------------------
// Jet1: value + gradient
// ---------------------------------------------------------------------------
struct Jet1 {
  double v = 0.0;
  int n = 0;
  std::array<double, kMaxDim> g{};

  static Jet1 constant(double c, int n) {
    Jet1 j;
    j.v = c;
    j.n = n;
    return j;
  }
  static Jet1 variable(double x, int i, int n) {
    Jet1 j = constant(x, n);
    j.g[static_cast<size_t>(i)] = 1.0;
    return j;
  }
};

inline Jet1 operator+(const Jet1& a, const Jet1& b) {
  Jet1 r = a;
  r.v += b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] += b.g[i];
  return r;
}
inline Jet1 operator-(const Jet1& a, const Jet1& b) {
  Jet1 r = a;
  r.v -= b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] -= b.g[i];
  return r;
}
inline Jet1 operator-(const Jet1& a) {
  Jet1 r = a;
  r.v = -r.v;
  for (int i = 0; i < r.n; ++i) r.g[i] = -r.g[i];
  return r;
}
inline Jet1 operator*(const Jet1& a, const Jet1& b) {
  Jet1 r = Jet1::constant(a.v * b.v, a.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  return r;
}
inline Jet1 operator/(const Jet1& a, const Jet1& b) {
  Jet1 r = Jet1::constant(a.v / b.v, a.n);
  const double ib = 1.0 / b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] = (a.g[i] - r.v * b.g[i]) * ib;
  return r;
}

// Chain rule for a unary function with value f and derivative fp at a.v.
inline Jet1 jet_unary(const Jet1& a, double f, double fp) {
  Jet1 r = Jet1::constant(f, a.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = fp * a.g[i];
  return r;
}

inline Jet1 sin(const Jet1& a) { return jet_unary(a, std::sin(a.v), std::cos(a.v)); }
inline Jet1 cos(const Jet1& a) { return jet_unary(a, std::cos(a.v), -std::sin(a.v)); }
inline Jet1 sinh(const Jet1& a) { return jet_unary(a, std::sinh(a.v), std::cosh(a.v)); }
inline Jet1 cosh(const Jet1& a) { return jet_unary(a, std::cosh(a.v), std::sinh(a.v)); }
inline Jet1 tanh(const Jet1& a) {
  const double t = std::tanh(a.v);
  return jet_unary(a, t, 1.0 - t * t);
}
inline Jet1 exp(const Jet1& a) {
  const double e = std::exp(a.v);
  return jet_unary(a, e, e);
}
inline Jet1 log(const Jet1& a) { return jet_unary(a, std::log(a.v), 1.0 / a.v); }
inline Jet1 sqrt(const Jet1& a) {
  const double s = std::sqrt(a.v);
  return jet_unary(a, s, 0.5 / s);
}

// ---------------------------------------------------------------------------
// Jet2: value + gradient + symmetric Hessian (lower triangle, packed)
// ---------------------------------------------------------------------------
struct Jet2 {
  double v = 0.0;
  int n = 0;
  std::array<double, kMaxDim> g{};
  std::array<double, kMaxDim*(kMaxDim + 1) / 2> h{};  // packed lower triangle

  static int hidx(int i, int j) {
    if (j > i) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }
  double hess(int i, int j) const { return h[static_cast<size_t>(hidx(i, j))]; }

  static Jet2 constant(double c, int n) {
    Jet2 j;
    j.v = c;
    j.n = n;
    return j;
  }
  static Jet2 variable(double x, int i, int n) {
    Jet2 j = constant(x, n);
    j.g[static_cast<size_t>(i)] = 1.0;
    return j;
  }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v += b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] += b.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] += b.h[k];
  return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v -= b.v;
  for (int i = 0; i < r.n; ++i) r.g[i] -= b.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] -= b.h[k];
  return r;
}
inline Jet2 operator-(const Jet2& a) {
  Jet2 r = a;
  r.v = -r.v;
  for (int i = 0; i < r.n; ++i) r.g[i] = -r.g[i];
  const int m = r.n * (r.n + 1) / 2;
  for (int k = 0; k < m; ++k) r.h[k] = -r.h[k];
  return r;
}
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r = Jet2::constant(a.v * b.v, a.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j <= i; ++j)
      r.h[Jet2::hidx(i, j)] = a.hess(i, j) * b.v + a.v * b.hess(i, j) +
                              a.g[i] * b.g[j] + a.g[j] * b.g[i];
  return r;
}

// Chain rule: r = f(a) with f, f', f'' evaluated at a.v.
inline Jet2 jet_unary(const Jet2& a, double f, double fp, double fpp) {
  Jet2 r = Jet2::constant(f, a.n);
  for (int i = 0; i < r.n; ++i) r.g[i] = fp * a.g[i];
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j <= i; ++j)
      r.h[Jet2::hidx(i, j)] = fp * a.hess(i, j) + fpp * a.g[i] * a.g[j];
  return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  const double iv = 1.0 / b.v;
  return a * jet_unary(b, iv, -iv * iv, 2.0 * iv * iv * iv);
}

inline Jet2 sin(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return jet_unary(a, s, c, -s);
}
inline Jet2 cos(const Jet2& a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return jet_unary(a, c, -s, -c);
}
inline Jet2 sinh(const Jet2& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return jet_unary(a, s, c, s);
}
inline Jet2 cosh(const Jet2& a) {
  const double s = std::sinh(a.v), c = std::cosh(a.v);
  return jet_unary(a, c, s, c);
}
inline Jet2 tanh(const Jet2& a) {
  const double t = std::tanh(a.v), d = 1.0 - t * t;
  return jet_unary(a, t, d, -2.0 * t * d);
}
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return jet_unary(a, e, e, e);
}
inline Jet2 log(const Jet2& a) {
  const double iv = 1.0 / a.v;
  return jet_unary(a, std::log(a.v), iv, -iv * iv);
}
inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return jet_unary(a, s, 0.5 / s, -0.25 / (s * a.v));
}

}  // namespace lorlab
