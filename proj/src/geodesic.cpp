#include "lorlab/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "lorlab/errors.hpp"

namespace lorlab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

struct GeoRhs {
  const MetricChart& chart;
  int n;

  Eigen::VectorXd operator()(const Eigen::VectorXd& z) const {
    std::vector<double> x(z.data(), z.data() + n);
    MetricJets J = chart.jets(x, 1);
    const double det = J.g.determinant();
    if (std::abs(det) < 1e-12)
      throw SingularMetric("metric degenerate along geodesic in chart \"" +
                           chart.name() + "\"");
    auto Gam = christoffel_from_jets(J, J.g.inverse());
    Eigen::VectorXd dz(2 * n);
    for (int i = 0; i < n; ++i) dz(i) = z(n + i);
    for (int k = 0; k < n; ++k) {
      double acc = 0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += Gam[static_cast<size_t>(k)](i, j) * z(n + i) * z(n + j);
      dz(n + k) = -acc;
    }
    return dz;
  }
};

std::vector<double> head(const Eigen::VectorXd& z, int n) {
  return std::vector<double>(z.data(), z.data() + n);
}
std::vector<double> tail(const Eigen::VectorXd& z, int n) {
  return std::vector<double>(z.data() + n, z.data() + 2 * n);
}

// Hermite interpolation between two samples; u in [0,1].
std::vector<double> hermite_point(const GeodesicSample& a, const GeodesicSample& b,
                                  double u) {
  const double dt = b.s - a.s;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  std::vector<double> out(a.x.size());
  for (size_t i = 0; i < a.x.size(); ++i)
    out[i] = h00 * a.x[i] + h10 * dt * a.v[i] + h01 * b.x[i] + h11 * dt * b.v[i];
  return out;
}

std::vector<double> hermite_velocity(const GeodesicSample& a, const GeodesicSample& b,
                                     double u) {
  const double dt = b.s - a.s;
  const double d00 = 6 * u * (u - 1);
  const double d10 = 3 * u * u - 4 * u + 1;
  const double d01 = -6 * u * (u - 1);
  const double d11 = 3 * u * u - 2 * u;
  std::vector<double> out(a.x.size());
  for (size_t i = 0; i < a.x.size(); ++i)
    out[i] = (d00 * a.x[i] + d10 * dt * a.v[i] + d01 * b.x[i] + d11 * dt * b.v[i]) / dt;
  return out;
}

}  // namespace

std::vector<double> Geodesic::point_at(double s) const {
  s = std::clamp(s, samples.front().s, samples.back().s);
  auto it = std::upper_bound(samples.begin(), samples.end(), s,
                             [](double val, const GeodesicSample& g) { return val < g.s; });
  if (it == samples.begin()) return samples.front().x;
  if (it == samples.end()) return samples.back().x;
  const GeodesicSample& b = *it;
  const GeodesicSample& a = *(it - 1);
  return hermite_point(a, b, (s - a.s) / (b.s - a.s));
}

std::vector<double> Geodesic::velocity_at(double s) const {
  s = std::clamp(s, samples.front().s, samples.back().s);
  auto it = std::upper_bound(samples.begin(), samples.end(), s,
                             [](double val, const GeodesicSample& g) { return val < g.s; });
  if (it == samples.begin()) return samples.front().v;
  if (it == samples.end()) return samples.back().v;
  const GeodesicSample& b = *it;
  const GeodesicSample& a = *(it - 1);
  return hermite_velocity(a, b, (s - a.s) / (b.s - a.s));
}

Geodesic integrate(const MetricChart& chart, std::span<const double> x0,
                   std::span<const double> v0, double s_max, double tol) {
  const int n = chart.dim();
  chart.require_in_domain(x0);
  if (!(s_max > 0)) throw ConfigError("integrate: s_max must be positive");
  if (!(tol > 0)) throw ConfigError("integrate: tol must be positive");

  GeoRhs rhs{chart, n};
  Eigen::VectorXd z(2 * n);
  for (int i = 0; i < n; ++i) {
    z(i) = x0[static_cast<size_t>(i)];
    z(n + i) = v0[static_cast<size_t>(i)];
  }

  Geodesic out;
  out.n = n;
  out.causal_class = classify(chart, x0, v0);
  out.samples.push_back({0.0, head(z, n), tail(z, n)});

  const double atol = tol, rtol = tol;
  const double h_min = 1e-14 * std::max(1.0, s_max);
  double s = 0.0;
  double h = s_max / 64.0;

  auto err_norm = [&](const Eigen::VectorXd& e, const Eigen::VectorXd& z_old,
                      const Eigen::VectorXd& z_new) {
    double acc = 0;
    for (int i = 0; i < 2 * n; ++i) {
      const double sc = atol + rtol * std::max(std::abs(z_old(i)), std::abs(z_new(i)));
      acc += (e(i) / sc) * (e(i) / sc);
    }
    return std::sqrt(acc / (2 * n));
  };

  Eigen::VectorXd k1 = rhs(z);
  while (s < s_max * (1 - 1e-15)) {
    h = std::min(h, s_max - s);
    if (h < h_min)
      throw StepSizeUnderflow("geodesic integrator stalled at s = " + std::to_string(s) +
                              " in chart \"" + chart.name() + "\"");
    Eigen::VectorXd k2 = rhs(z + h * (A21 * k1));
    Eigen::VectorXd k3 = rhs(z + h * (A31 * k1 + A32 * k2));
    Eigen::VectorXd k4 = rhs(z + h * (A41 * k1 + A42 * k2 + A43 * k3));
    Eigen::VectorXd k5 = rhs(z + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
    Eigen::VectorXd k6 = rhs(z + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
    Eigen::VectorXd z5 = z + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
    Eigen::VectorXd k7 = rhs(z5);
    Eigen::VectorXd err =
        h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
    const double en = err_norm(err, z, z5);
    if (en <= 1.0) {
      GeodesicSample prev = out.samples.back();
      GeodesicSample cand{s + h, head(z5, n), tail(z5, n)};
      if (!chart.in_domain(cand.x)) {
        // locate the boundary crossing on the Hermite interpolant
        double lo = 0.0, hi = 1.0;
        for (int iter = 0; iter < 60; ++iter) {
          const double mid = 0.5 * (lo + hi);
          if (chart.in_domain(hermite_point(prev, cand, mid))) lo = mid;
          else hi = mid;
        }
        GeodesicSample exit_sample{prev.s + lo * (cand.s - prev.s),
                                   hermite_point(prev, cand, lo),
                                   hermite_velocity(prev, cand, lo)};
        if (exit_sample.s > prev.s) out.samples.push_back(exit_sample);
        out.status = GeodesicStatus::exited_domain;
        out.s_end = out.samples.back().s;
        break;
      }
      out.samples.push_back(std::move(cand));
      s += h;
      out.s_end = s;
      z = z5;
      k1 = k7;  // first-same-as-last
      const double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      h *= std::clamp(fac, 0.2, 5.0);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  if (out.status == GeodesicStatus::complete) out.s_end = s;

  const double norm2 = out.causal_class.norm2;
  if (out.causal_class.tag == CausalTag::timelike)
    out.proper_time = std::sqrt(std::max(0.0, norm2)) * out.s_end;
  return out;
}

std::vector<double> exp_map(const MetricChart& chart, std::span<const double> x,
                            std::span<const double> v, double tol) {
  Geodesic g = integrate(chart, x, v, 1.0, tol);
  if (g.status == GeodesicStatus::exited_domain)
    throw OutOfDomain("geodesic left chart \"" + chart.name() +
                      "\" before reaching s = 1");
  return g.samples.back().x;
}

ShootResult shoot_bvp(const MetricChart& chart, std::span<const double> x,
                      std::span<const double> y, std::span<const double> v_guess,
                      double tol) {
  const int n = chart.dim();
  chart.require_in_domain(x);
  chart.require_in_domain(y);
  const double int_tol = std::min(1e-10, 0.01 * tol);

  Eigen::VectorXd v(n);
  if (v_guess.empty())
    for (int i = 0; i < n; ++i) v(i) = y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)];
  else
    for (int i = 0; i < n; ++i) v(i) = v_guess[static_cast<size_t>(i)];

  auto is_future_timelike = [&](const Eigen::VectorXd& w) {
    CausalClass c = classify(chart, x, std::span<const double>(w.data(), static_cast<size_t>(n)));
    return c.tag == CausalTag::timelike && c.direction == CausalDir::future;
  };
  if (!is_future_timelike(v))
    throw NotCausallyConnectable("shooting guess from the chart difference is not future timelike");

  auto endpoint = [&](const Eigen::VectorXd& w) {
    std::vector<double> e =
        exp_map(chart, x, std::span<const double>(w.data(), static_cast<size_t>(n)), int_tol);
    return Eigen::Map<Eigen::VectorXd>(e.data(), n).eval();
  };
  Eigen::VectorXd target(n);
  for (int i = 0; i < n; ++i) target(i) = y[static_cast<size_t>(i)];

  // If the guess geodesic leaves the chart before s = 1, damp it until the
  // endpoint map is defined; Newton then walks back out toward the target.
  Eigen::VectorXd F;
  {
    bool defined = false;
    for (int damp = 0; damp < 40 && !defined; ++damp) {
      try {
        F = endpoint(v) - target;
        defined = true;
      } catch (const OutOfDomain&) {
        v *= 0.5;
      } catch (const StepSizeUnderflow&) {
        v *= 0.5;
      }
    }
    if (!defined)
      throw NoConvergence("no admissible initial guess for the shooting endpoint map");
  }
  double res = F.norm();
  const int max_iter = 50;
  for (int iter = 0; iter < max_iter && res > tol; ++iter) {
    // forward-difference Jacobian
    const double delta = 1e-6 * std::max(v.norm(), 1e-6);
    Eigen::MatrixXd Jac(n, n);
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd vp = v;
      vp(j) += delta;
      try {
        Jac.col(j) = (endpoint(vp) - target - F) / delta;
      } catch (const Error&) {  // perturbed guess left the chart: use backward step
        vp(j) -= 2 * delta;
        try {
          Jac.col(j) = (F - (endpoint(vp) - target)) / delta;
        } catch (const Error&) {
          throw NoConvergence("shooting Jacobian column " + std::to_string(j) +
                              " undefined at the current guess");
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Jac);
    if (!lu.isInvertible())
      throw NoConvergence("shooting Jacobian singular after " + std::to_string(iter) +
                          " iterations");
    Eigen::VectorXd dv = lu.solve(-F);

    double alpha = 1.0;
    bool accepted = false;
    bool cone_only = true;
    for (int halving = 0; halving < 30; ++halving, alpha *= 0.5) {
      Eigen::VectorXd v_try = v + alpha * dv;
      if (!is_future_timelike(v_try)) continue;
      try {
        Eigen::VectorXd F_try = endpoint(v_try) - target;
        cone_only = false;
        if (F_try.norm() < res) {
          v = v_try;
          F = F_try;
          res = F.norm();
          accepted = true;
          break;
        }
      } catch (const OutOfDomain&) {
        cone_only = false;  // left the box, not the cone
      } catch (const StepSizeUnderflow&) {
        cone_only = false;
      }
    }
    if (!accepted) {
      if (cone_only)
        throw NotCausallyConnectable("every damped shooting step leaves the future cone");
      throw NoConvergence("shooting line search failed at residual " + std::to_string(res));
    }
  }
  if (res > tol)
    throw NoConvergence("shooting did not reach tolerance: residual " + std::to_string(res));

  ShootResult out;
  out.v.assign(v.data(), v.data() + n);
  out.geod = integrate(chart, x, out.v, 1.0, int_tol);
  return out;
}

}  // namespace lorlab
