#include "lorlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lorlab {

namespace {

// Legendre polynomial P_n and derivative at t by the three-term recurrence.
std::pair<double, double> legendre(int n, double t) {
  double p0 = 1.0, p1 = t;
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (t * p1 - p0) / (t * t - 1.0);
  return {p1, dp};
}

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev-based initial guess for the i-th root (descending order).
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(n, t);
      double step = p / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    auto [p, dp] = legendre(n, t);
    (void)p;
    rule.x[i] = t;
    rule.w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 200) throw std::invalid_argument("gauss_legendre: order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

GaussRule gauss_legendre_on(int order, double a, double b) {
  const GaussRule& base = gauss_legendre(order);
  GaussRule out;
  out.x.resize(base.x.size());
  out.w.resize(base.w.size());
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t i = 0; i < base.x.size(); ++i) {
    out.x[i] = mid + half * base.x[i];
    out.w[i] = half * base.w[i];
  }
  return out;
}

}  // namespace lorlab
