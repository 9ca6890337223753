#include "lorlab/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lorlab/errors.hpp"

namespace lorlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inf_aware_diff(double a, double b) {
  // a - b with "same infinity" collapsing to zero change
  if (std::isinf(a) && std::isinf(b) && a == b) return 0.0;
  return a - b;
}

std::vector<double> to_vec(std::span<const double> x) {
  return std::vector<double>(x.begin(), x.end());
}

// Chord guess from x toward y, inflated along the raised time orientation
// until future timelike. Near a causal horizon the plain chord turns
// spacelike even for connected pairs; an in-cone guess keeps the shooting
// solver applicable there.
std::vector<double> cone_guess(const MetricChart& chart, std::span<const double> x,
                               std::span<const double> y) {
  const int n = chart.dim();
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)];
  auto future_timelike = [&](const std::vector<double>& w) {
    CausalClass c = classify(chart, x, w);
    return c.tag == CausalTag::timelike && c.direction == CausalDir::future;
  };
  if (future_timelike(v)) return v;
  const MetricEval m = eval_metric(chart, x);
  Eigen::VectorXd t_up = raise_index(m, chart.time_orientation(x));
  t_up /= t_up.norm();
  double vnorm = 0;
  for (double c : v) vnorm += c * c;
  double lam = std::max(1e-3, 0.25 * std::sqrt(vnorm));
  for (int k = 0; k < 80; ++k, lam *= 2) {
    std::vector<double> w = v;
    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] += lam * t_up(i);
    if (future_timelike(w)) return w;
  }
  return v;  // give up; the solver will report the failure itself
}

// ell(x, y) preferring the shooting solver with a cone-inflated warm start;
// a claimed disconnection is cross-checked with the action method before
// being accepted as -inf.
double ell_confirmed(const MetricChart& chart, std::span<const double> x,
                     std::span<const double> y, std::vector<double>& v_warm) {
  try {
    std::vector<double> guess = v_warm.empty() ? cone_guess(chart, x, y) : v_warm;
    ShootResult sr = shoot_bvp(chart, x, y, guess);
    v_warm = sr.v;
    return sr.geod.proper_time;
  } catch (const NotCausallyConnectable&) {
    v_warm.clear();
    return ell_action(chart, x, y, 64).value;  // -inf only if this agrees
  } catch (const NoConvergence&) {
    v_warm.clear();
    return ell_action(chart, x, y).value;
  } catch (const StepSizeUnderflow&) {
    v_warm.clear();
    return ell_action(chart, x, y).value;
  }
}

}  // namespace

std::vector<double> LineSpec::point(double r) const {
  return r >= 0 ? forward.point_at(r) : backward.point_at(-r);
}

std::vector<double> LineSpec::velocity(double r) const {
  if (r >= 0) return forward.velocity_at(r);
  std::vector<double> v = backward.velocity_at(-r);
  for (double& c : v) c = -c;  // backward half runs in reversed parameter
  return v;
}

LineSpec make_line(const MetricChart& chart, std::span<const double> base,
                   std::span<const double> tangent, double r_max) {
  if (r_max <= 0) throw ConfigError("line needs a positive parameter range");
  chart.require_in_domain(base);
  const double norm = lorentz_norm_vector(chart, base, tangent);
  if (std::abs(norm - 1.0) > 1e-9)
    throw ConfigError("line tangent is not unit: |v|_g = " + std::to_string(norm));
  LineSpec line;
  line.chart = &chart;
  line.base = to_vec(base);
  line.tangent = to_vec(tangent);
  line.r_max = r_max;
  line.forward = integrate(chart, base, tangent, r_max, 1e-11);
  std::vector<double> neg(tangent.begin(), tangent.end());
  for (double& c : neg) c = -c;
  line.backward = integrate(chart, base, neg, r_max, 1e-11);
  if (line.forward.status != GeodesicStatus::complete ||
      line.backward.status != GeodesicStatus::complete)
    throw ConfigError("line leaves the chart box inside its parameter range");
  return line;
}

LineSpec rebase_line(const LineSpec& line, double delta) {
  if (std::abs(delta) >= line.r_max)
    throw ConfigError("rebase offset exceeds the line's parameter range");
  const MetricChart& chart = *line.chart;
  std::vector<double> base = line.point(delta);
  std::vector<double> tangent = line.velocity(delta);
  // renormalize: dense-output velocities carry integrator tolerance
  const double norm = lorentz_norm_vector(chart, base, tangent);
  for (double& c : tangent) c /= norm;
  return make_line(chart, base, tangent, line.r_max - std::abs(delta));
}

std::vector<double> default_r_schedule(const MetricChart& chart,
                                       std::span<const double> base) {
  // Reach along the time axis is the proxy for how far a vertical line can
  // run before hitting the chart box.
  const auto& box = chart.domain_box();
  const double reach = std::min(box[0][1] - base[0], base[0] - box[0][0]);
  if (reach <= 0) throw ConfigError("base point outside the chart box");
  const double scale = 0.9 * reach / 40.0;
  return {5.0 * scale, 10.0 * scale, 20.0 * scale, 40.0 * scale};
}

BusemannField::BusemannField(LineSpec line, BusemannDirection direction,
                             std::vector<double> r_schedule)
    : line_(std::move(line)), direction_(direction),
      r_schedule_(std::move(r_schedule)) {
  if (r_schedule_.empty()) throw ConfigError("empty radius schedule");
  for (size_t i = 0; i < r_schedule_.size(); ++i) {
    if (r_schedule_[i] <= 0)
      throw ConfigError("schedule radii must be positive");
    if (i > 0 && r_schedule_[i] <= r_schedule_[i - 1])
      throw ConfigError("schedule radii must increase");
    if (r_schedule_[i] > line_.r_max + 1e-12)
      throw ConfigError("schedule radius exceeds the line's range");
  }
}

double BusemannField::line_separation(double r) {
  {
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = line_ell_.find(r);
    if (it != line_ell_.end()) return it->second;
  }
  const MetricChart& chart = *line_.chart;
  double value;
  if (r >= 0) {
    std::vector<double> guess(line_.tangent);
    for (double& c : guess) c *= r;
    value = shoot_bvp(chart, line_.base, line_.point(r), guess).geod.proper_time;
  } else {
    std::vector<double> src = line_.point(r);
    std::vector<double> guess = line_.velocity(r);
    for (double& c : guess) c *= -r;
    value = shoot_bvp(chart, src, line_.base, guess).geod.proper_time;
  }
  std::lock_guard<std::mutex> lock(*mutex_);
  line_ell_.emplace(r, value);
  return value;
}

double BusemannField::raw_value_r(std::span<const double> x, double r,
                                  std::vector<double>& v_warm) {
  const MetricChart& chart = *line_.chart;
  if (direction_ == BusemannDirection::forward) {
    const double l_xg = ell_confirmed(chart, x, line_.point(r), v_warm);
    if (std::isinf(l_xg)) return kInf;
    return line_separation(r) - l_xg;
  }
  // backward: b-_{-r}(x) = ell(gamma(-r), x) - ell(gamma(-r), gamma(0))
  const double l_gx = ell_confirmed(chart, line_.point(-r), x, v_warm);
  if (std::isinf(l_gx)) return -kInf;
  return l_gx - line_separation(-r);  // ell(gamma(-r), gamma(0)), memoized
}

double BusemannField::value_r(std::span<const double> x, double r) {
  if (r <= 0) throw ConfigError("finite-radius parameter must be positive");
  if (r > line_.r_max + 1e-12)
    throw ConfigError("radius outside the line's parameter range");
  line_.chart->require_in_domain(x);
  // serve from the memo when r sits on the schedule
  for (double rs : r_schedule_) {
    if (rs == r) {
      const BusemannValues& v = values_at(x);
      for (size_t i = 0; i < r_schedule_.size(); ++i)
        if (r_schedule_[i] == r) return v.per_r[i];
    }
  }
  std::vector<double> warm;
  return raw_value_r(x, r, warm);
}

const BusemannValues& BusemannField::values_at(std::span<const double> x) {
  std::vector<double> key = to_vec(x);
  {
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  line_.chart->require_in_domain(x);
  BusemannValues vals;
  std::vector<double> warm;
  std::vector<double> prev_target;
  for (double r : r_schedule_) {
    // shift the warm start by the witness-point displacement
    std::vector<double> target = line_.point(direction_ == BusemannDirection::forward ? r : -r);
    if (!warm.empty() && !prev_target.empty() &&
        direction_ == BusemannDirection::forward) {
      for (size_t i = 0; i < warm.size(); ++i)
        warm[i] += target[i] - prev_target[i];
    }
    prev_target = target;
    vals.per_r.push_back(raw_value_r(x, r, warm));
  }

  // extrapolate v = limit + c / r on the last three finite values
  std::vector<double> rs, vs;
  for (size_t i = 0; i < vals.per_r.size(); ++i) {
    if (std::isfinite(vals.per_r[i])) {
      rs.push_back(r_schedule_[i]);
      vs.push_back(vals.per_r[i]);
    }
  }
  if (!std::isfinite(vals.per_r.back()) || vs.empty()) {
    vals.finite = false;
    vals.limit = direction_ == BusemannDirection::forward ? kInf : -kInf;
  } else if (vs.size() == 1) {
    vals.limit = vs.back();
  } else {
    const size_t m = std::min<size_t>(3, vs.size());
    double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;  // basis {1, 1/r}
    for (size_t i = vs.size() - m; i < vs.size(); ++i) {
      const double u = 1.0 / rs[i];
      s00 += 1.0;
      s01 += u;
      s11 += u * u;
      b0 += vs[i];
      b1 += u * vs[i];
    }
    const double det = s00 * s11 - s01 * s01;
    vals.limit = det != 0 ? (b0 * s11 - b1 * s01) / det : vs.back();
  }

  std::lock_guard<std::mutex> lock(*mutex_);
  auto [it, inserted] = memo_.emplace(std::move(key), std::move(vals));
  (void)inserted;  // losing a concurrent race keeps the equivalent entry
  return it->second;
}

double b_plus_r(BusemannField& field, std::span<const double> x, double r) {
  if (field.direction() != BusemannDirection::forward)
    throw ConfigError("b_plus_r needs a forward field");
  return field.value_r(x, r);
}

double b_minus_r(BusemannField& field, std::span<const double> x, double r) {
  if (field.direction() != BusemannDirection::backward)
    throw ConfigError("b_minus_r needs a backward field");
  if (r >= 0) throw ConfigError("b_minus_r expects a negative radius");
  return field.value_r(x, -r);
}

ConvergenceReport busemann_limit(BusemannField& field, std::span<const double> x,
                                 double diff_tol) {
  const BusemannValues& vals = field.values_at(x);
  ConvergenceReport rep;
  rep.radii = field.r_schedule();
  rep.per_r = vals.per_r;
  rep.limit = vals.limit;
  for (size_t i = 0; i + 1 < vals.per_r.size(); ++i)
    rep.diffs.push_back(inf_aware_diff(vals.per_r[i + 1], vals.per_r[i]));

  const bool fwd = field.direction() == BusemannDirection::forward;
  rep.monotone = true;
  for (double d : rep.diffs) {
    if (fwd ? d > 1e-6 : d < -1e-6) rep.monotone = false;
  }
  if (!vals.finite) {
    rep.converged = true;  // definite causal disconnection
    return rep;
  }
  const size_t m = rep.diffs.size();
  rep.converged = m == 0 || std::abs(rep.diffs[m - 1]) <= diff_tol;
  if (m >= 2 && std::abs(rep.diffs[m - 1]) > diff_tol &&
      std::abs(rep.diffs[m - 2]) > diff_tol)
    throw NotConverged("finite-radius values still moving: last differences " +
                       std::to_string(rep.diffs[m - 2]) + ", " +
                       std::to_string(rep.diffs[m - 1]));
  return rep;
}

OrderingReport check_ordering(BusemannField& forward_field,
                              BusemannField& backward_field,
                              std::span<const double> x, double r, double tol) {
  if (forward_field.direction() != BusemannDirection::forward ||
      backward_field.direction() != BusemannDirection::backward)
    throw ConfigError("check_ordering needs a forward and a backward field");
  OrderingReport rep;
  rep.tol = tol;
  rep.b_plus_r = forward_field.value_r(x, r);
  rep.b_plus = busemann_limit(forward_field, x).limit;
  rep.b_minus = busemann_limit(backward_field, x).limit;
  rep.b_minus_mr = backward_field.value_r(x, r);
  rep.chain_ok = rep.b_plus_r >= rep.b_plus - tol &&
                 rep.b_plus >= rep.b_minus - tol &&
                 rep.b_minus >= rep.b_minus_mr - tol;
  const double hi = std::max(std::max(rep.b_plus_r, rep.b_plus),
                             std::max(rep.b_minus, rep.b_minus_mr));
  const double lo = std::min(std::min(rep.b_plus_r, rep.b_plus),
                             std::min(rep.b_minus, rep.b_minus_mr));
  rep.all_equal = std::isfinite(hi) && std::isfinite(lo) && hi - lo <= tol;
  return rep;
}

SteepnessReport check_steepness(BusemannField& field, std::span<const double> x,
                                std::span<const double> y) {
  SteepnessReport rep;
  rep.radii = field.r_schedule();
  rep.ell_xy = ell(*field.line().chart, x, y).value;
  rep.pass = true;
  for (double r : rep.radii) {
    const double vx = field.value_r(x, r);
    const double vy = field.value_r(y, r);
    double lhs;
    if (std::isinf(vy) && vy > 0) lhs = kInf;          // y escapes upward
    else if (std::isinf(vx)) lhs = vx > 0 ? -kInf : kInf;
    else lhs = vy - vx;
    rep.lhs.push_back(lhs);
    if (!(lhs >= rep.ell_xy - rep.tol)) rep.pass = false;
  }
  return rep;
}

std::vector<double> gradient_fd(BusemannField& field, std::span<const double> x,
                                double h) {
  const int n = field.line().chart->dim();
  std::vector<double> grad(static_cast<size_t>(n));
  std::vector<double> p = to_vec(x);
  for (int i = 0; i < n; ++i) {
    p[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + h;
    const double fp = busemann_limit(field, p).limit;
    p[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - h;
    const double fm = busemann_limit(field, p).limit;
    p[static_cast<size_t>(i)] = x[static_cast<size_t>(i)];
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NotConverged("limit not finite on the gradient stencil");
    grad[static_cast<size_t>(i)] = (fp - fm) / (2 * h);
  }
  return grad;
}

double semiconcavity_estimate(const ScalarField& f, const Box& region,
                              double scale, int samples, uint64_t seed,
                              int random_dirs) {
  const int n = static_cast<int>(region.size());
  std::mt19937_64 rng(seed ^ 0x51637791a3c8d2e5ULL);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> dirs;
  for (int i = 0; i < n; ++i) {
    std::vector<double> d(static_cast<size_t>(n), 0.0);
    d[static_cast<size_t>(i)] = 1.0;
    dirs.push_back(std::move(d));
  }
  for (int k = 0; k < random_dirs; ++k) {
    std::vector<double> d(static_cast<size_t>(n));
    double norm = 0;
    for (double& c : d) {
      c = gauss(rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (double& c : d) c /= norm;
    dirs.push_back(std::move(d));
  }

  double c_hat = -kInf;
  std::vector<double> x(static_cast<size_t>(n)), probe(static_cast<size_t>(n));
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) {
      const double lo = region[static_cast<size_t>(i)][0] + scale;
      const double hi = region[static_cast<size_t>(i)][1] - scale;
      x[static_cast<size_t>(i)] = lo + (hi - lo) * u01(rng);
    }
    const double f0 = f(x);
    if (!std::isfinite(f0)) continue;
    for (const auto& d : dirs) {
      double q[3];
      bool ok = true;
      for (int level = 0; level < 3 && ok; ++level) {
        const double w = scale / (1 << level);
        for (int i = 0; i < n; ++i)
          probe[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + w * d[static_cast<size_t>(i)];
        const double fp = f(probe);
        for (int i = 0; i < n; ++i)
          probe[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - w * d[static_cast<size_t>(i)];
        const double fm = f(probe);
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
          ok = false;
          break;
        }
        q[level] = (fp + fm - 2 * f0) / (w * w);
      }
      if (!ok) continue;  // infinities are excluded from the quotients
      const double r1 = (4 * q[1] - q[0]) / 3;
      const double r2 = (4 * q[2] - q[1]) / 3;
      c_hat = std::max(c_hat, (16 * r2 - r1) / 15);
    }
  }
  return c_hat;
}

double lipschitz_estimate(const ScalarField& f, const Box& region, double scale,
                          int samples, uint64_t seed) {
  const int n = static_cast<int>(region.size());
  std::mt19937_64 rng(seed ^ 0x8b72e1f54c09a6d3ULL);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double l_hat = 0.0;
  std::vector<double> x(static_cast<size_t>(n)), y(static_cast<size_t>(n));
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) {
      const double lo = region[static_cast<size_t>(i)][0];
      const double hi = region[static_cast<size_t>(i)][1];
      x[static_cast<size_t>(i)] = lo + (hi - lo) * u01(rng);
    }
    const double fx = f(x);
    if (!std::isfinite(fx)) continue;
    // axis probes plus one random direction per sample
    for (int k = 0; k <= n; ++k) {
      std::vector<double> d(static_cast<size_t>(n), 0.0);
      if (k < n) {
        d[static_cast<size_t>(k)] = 1.0;
      } else {
        double norm = 0;
        for (double& c : d) {
          c = gauss(rng);
          norm += c * c;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-12) continue;
        for (double& c : d) c /= norm;
      }
      bool inside = true;
      for (int i = 0; i < n; ++i) {
        y[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + scale * d[static_cast<size_t>(i)];
        if (y[static_cast<size_t>(i)] < region[static_cast<size_t>(i)][0] ||
            y[static_cast<size_t>(i)] > region[static_cast<size_t>(i)][1])
          inside = false;
      }
      if (!inside) continue;
      const double fy = f(y);
      if (!std::isfinite(fy)) continue;
      l_hat = std::max(l_hat, std::abs(fy - fx) / scale);
    }
  }
  return l_hat;
}

UpperSupportReport upper_support_check(BusemannField& field,
                                       std::span<const double> x, double r,
                                       double s, int samples, double radius,
                                       uint64_t seed) {
  if (field.direction() != BusemannDirection::forward)
    throw ConfigError("upper_support_check needs a forward field");
  const MetricChart& chart = *field.line().chart;
  const std::vector<double> target = field.line().point(r);
  ShootResult sigma = shoot_bvp(chart, x, target);  // maximizer to gamma(r)
  const double s_r = sigma.geod.proper_time;
  if (!(s > 0) || s > s_r + 1e-12)
    throw ConfigError("support parameter must satisfy 0 < s <= ell(x, gamma(r))");

  const std::vector<double> anchor = sigma.geod.point_at(s / s_r);
  const double ell_x_anchor = ell(chart, x, anchor).value;
  const double b_x = field.value_r(x, r);

  UpperSupportReport rep;
  auto u_r = [&](std::span<const double> xp) {
    const double l = ell(chart, xp, anchor).value;
    if (std::isinf(l)) return kInf;  // xp outside the past of the anchor
    return b_x + ell_x_anchor - l;
  };

  std::mt19937_64 rng(seed ^ 0x3fb97d21c5a804e7ULL);
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  const int n = chart.dim();
  std::vector<double> xp(static_cast<size_t>(n));
  int used = 0;
  for (int k = 0; k < samples * 4 && used < samples; ++k) {
    for (int i = 0; i < n; ++i)
      xp[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] + radius * u11(rng);
    if (!chart.in_domain(xp)) continue;
    ++used;
    const double u = u_r(xp);
    const double b = field.value_r(xp, r);
    if (std::isinf(u) && u > 0) continue;  // +inf dominates everything
    const double viol = std::isinf(b) ? kInf : b - u;
    rep.max_violation = std::max(rep.max_violation, viol);
  }
  rep.inequality_ok = rep.max_violation <= rep.tol;

  for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const std::vector<double> p = sigma.geod.point_at(frac * s / s_r);
    const double u = u_r(p);
    const double b = field.value_r(p, r);
    if (std::isfinite(u) && std::isfinite(b))
      rep.max_equality_dev = std::max(rep.max_equality_dev, std::abs(u - b));
    else
      rep.max_equality_dev = kInf;
  }
  rep.equality_ok = rep.max_equality_dev <= rep.tol;
  return rep;
}

}  // namespace lorlab
