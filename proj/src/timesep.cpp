#include "lorlab/timesep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lorlab/errors.hpp"

namespace lorlab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double eucl_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// One chord under the midpoint metric: quadratic form, causal flag, length.
struct Chord {
  double q = 0;       // g_mid(d, d)
  double tau_d = 0;   // time orientation paired with d
  double eucl2 = 0;   // euclidean |d|^2 (null-band scale)
};

Chord eval_chord(const MetricChart& chart, const std::vector<double>& a,
                 const std::vector<double>& b) {
  const int n = chart.dim();
  std::vector<double> mid(static_cast<size_t>(n));
  Eigen::VectorXd d(n);
  Chord c;
  for (int i = 0; i < n; ++i) {
    mid[static_cast<size_t>(i)] = 0.5 * (a[static_cast<size_t>(i)] + b[static_cast<size_t>(i)]);
    d(i) = b[static_cast<size_t>(i)] - a[static_cast<size_t>(i)];
    c.eucl2 += d(i) * d(i);
  }
  Eigen::MatrixXd g = chart.components(mid);
  c.q = d.dot(g * d);
  c.tau_d = chart.time_orientation(mid).dot(d);
  return c;
}

bool chord_future_causal(const Chord& c) {
  if (c.eucl2 == 0.0) return true;  // degenerate zero chord
  const double band = 1e-9 * c.eucl2;
  if (c.q < -band) return false;                  // spacelike
  if (c.q > band) return c.tau_d > 0;             // timelike: needs future
  return c.tau_d >= 0;                            // null band
}

// Regularized contribution: sqrt(q) with the near-null floor at zero.
double chord_length(const Chord& c) {
  if (c.q <= 1e-12 * c.eucl2) return 0.0;
  return std::sqrt(c.q);
}

// Continuum Lorentzian length of one straight chord by 4-point quadrature.
// Unlike the midpoint rule this never overshoots the true arclength, which
// keeps the optimized action monotone under segment refinement.
double chord_length_quad(const MetricChart& chart, const std::vector<double>& a,
                         const std::vector<double>& b) {
  static constexpr double kU[4] = {0.069431844202973712, 0.330009478207571868,
                                   0.669990521792428132, 0.930568155797026288};
  static constexpr double kW[4] = {0.173927422568726929, 0.326072577431273071,
                                   0.326072577431273071, 0.173927422568726929};
  const int n = chart.dim();
  Eigen::VectorXd d(n);
  double eucl2 = 0;
  for (int i = 0; i < n; ++i) {
    d(i) = b[static_cast<size_t>(i)] - a[static_cast<size_t>(i)];
    eucl2 += d(i) * d(i);
  }
  std::vector<double> s(static_cast<size_t>(n));
  double total = 0;
  for (int q = 0; q < 4; ++q) {
    for (int i = 0; i < n; ++i)
      s[static_cast<size_t>(i)] = a[static_cast<size_t>(i)] + kU[q] * d(i);
    const double qq = d.dot(chart.components(s) * d);
    if (qq > 1e-12 * eucl2) total += kW[q] * std::sqrt(qq);
  }
  return total;
}

double polyline_action(const MetricChart& chart,
                       const std::vector<std::vector<double>>& nodes) {
  double total = 0;
  for (size_t k = 0; k + 1 < nodes.size(); ++k)
    total += chord_length_quad(chart, nodes[k], nodes[k + 1]);
  return total;
}

bool curve_causal(const MetricChart& chart, const std::vector<std::vector<double>>& nodes) {
  for (size_t k = 0; k + 1 < nodes.size(); ++k)
    if (!chord_future_causal(eval_chord(chart, nodes[k], nodes[k + 1]))) return false;
  return true;
}

// Resample a polyline to a new segment count (linear in uniform parameter).
std::vector<std::vector<double>> resample(const std::vector<std::vector<double>>& nodes,
                                          int segments) {
  const int old_segments = static_cast<int>(nodes.size()) - 1;
  const size_t n = nodes.front().size();
  std::vector<std::vector<double>> out(static_cast<size_t>(segments) + 1,
                                       std::vector<double>(n));
  for (int j = 0; j <= segments; ++j) {
    const double u = static_cast<double>(j) / segments * old_segments;
    const int k = std::min(static_cast<int>(u), old_segments - 1);
    const double w = u - k;
    for (size_t i = 0; i < n; ++i)
      out[static_cast<size_t>(j)][i] =
          (1 - w) * nodes[static_cast<size_t>(k)][i] + w * nodes[static_cast<size_t>(k) + 1][i];
  }
  out.front() = nodes.front();
  out.back() = nodes.back();
  return out;
}

// Initial causal polyline candidates: the straight chord, then variants with
// the spatial motion concentrated in one parameter window (helps when the
// cone narrows along the chord), then jittered chords.
std::vector<std::vector<double>> causal_initializer(const MetricChart& chart,
                                                    std::span<const double> x,
                                                    std::span<const double> y,
                                                    int segments, std::mt19937_64& rng,
                                                    bool& found) {
  const int n = chart.dim();
  auto straight = [&](int N) {
    std::vector<std::vector<double>> nodes(static_cast<size_t>(N) + 1,
                                           std::vector<double>(static_cast<size_t>(n)));
    for (int k = 0; k <= N; ++k)
      for (int i = 0; i < n; ++i)
        nodes[static_cast<size_t>(k)][static_cast<size_t>(i)] =
            x[static_cast<size_t>(i)] +
            (y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)]) * k / N;
    return nodes;
  };
  found = true;
  auto nodes = straight(segments);
  if (curve_causal(chart, nodes)) return nodes;

  // Cone-width allocation: time runs linearly while spatial progress is
  // distributed in proportion to how much spatial motion the local cone
  // admits per time step along the chord.  Two passes so charts whose
  // coefficients depend on the spatial coordinates get refreshed widths.
  {
    Eigen::VectorXd dsp = Eigen::VectorXd::Zero(n);
    for (int i = 1; i < n; ++i)
      dsp(i) = y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)];
    const double sp_norm = dsp.norm();
    const double dt = (y[0] - x[0]) / segments;
    if (sp_norm > 0 && dt > 0) {
      Eigen::VectorXd shat = dsp / sp_norm;
      Eigen::VectorXd et = Eigen::VectorXd::Zero(n);
      et(0) = 1.0;
      auto cand = nodes;  // start from the straight chord
      for (int pass = 0; pass < 2; ++pass) {
        std::vector<double> width(static_cast<size_t>(segments), 0.0);
        double wtot = 0;
        for (int k = 0; k < segments; ++k) {
          std::vector<double> mid(static_cast<size_t>(n));
          for (int i = 0; i < n; ++i)
            mid[static_cast<size_t>(i)] =
                0.5 * (cand[static_cast<size_t>(k)][static_cast<size_t>(i)] +
                       cand[static_cast<size_t>(k) + 1][static_cast<size_t>(i)]);
          Eigen::MatrixXd g = chart.components(mid);
          const double a = shat.dot(g * shat);          // spatial-spatial (< 0)
          const double b = 2.0 * dt * et.dot(g * shat); // cross term
          const double c = dt * dt * g(0, 0);           // time-time (> 0)
          double w = 0;
          if (a < 0 && c > 0) {
            const double disc = b * b - 4 * a * c;
            if (disc > 0) {
              const double s = std::sqrt(disc);
              w = std::max((-b + s) / (2 * a), (-b - s) / (2 * a));
            }
          }
          width[static_cast<size_t>(k)] = std::max(w, 0.0);
          wtot += width[static_cast<size_t>(k)];
        }
        if (wtot <= 0) break;
        double frac = 0;
        for (int k = 1; k < segments; ++k) {
          frac += width[static_cast<size_t>(k) - 1] / wtot;
          for (int i = 1; i < n; ++i)
            cand[static_cast<size_t>(k)][static_cast<size_t>(i)] =
                x[static_cast<size_t>(i)] + dsp(i) * frac;
        }
      }
      if (curve_causal(chart, cand)) return cand;
    }
  }

  // spatial motion compressed into [a, a+w] of the parameter
  for (double w : {0.3, 0.5, 0.15}) {
    for (double a : {0.0, 0.2, 0.35, 0.5, 0.7, 0.85}) {
      if (a + w > 1.0) continue;
      auto cand = nodes;
      for (int k = 0; k <= segments; ++k) {
        const double u = static_cast<double>(k) / segments;
        const double uw = std::clamp((u - a) / w, 0.0, 1.0);
        cand[static_cast<size_t>(k)][0] =
            x[0] + (y[0] - x[0]) * u;  // time linear
        for (int i = 1; i < n; ++i)
          cand[static_cast<size_t>(k)][static_cast<size_t>(i)] =
              x[static_cast<size_t>(i)] +
              (y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)]) * uw;
      }
      if (curve_causal(chart, cand)) return cand;
    }
  }

  // jittered restarts around the straight chord
  const double scale = 0.25 * eucl_dist(x, y) / segments;
  std::normal_distribution<double> noise(0.0, scale);
  for (int restart = 0; restart < 8; ++restart) {
    auto cand = nodes;
    for (int k = 1; k < segments; ++k)
      for (int i = 0; i < n; ++i)
        cand[static_cast<size_t>(k)][static_cast<size_t>(i)] += noise(rng);
    if (curve_causal(chart, cand)) return cand;
  }
  found = false;
  return nodes;
}

// One Gauss-Seidel ascent sweep over interior nodes; returns the new action.
double ascent_sweep(const MetricChart& chart, std::vector<std::vector<double>>& nodes,
                    const std::vector<std::array<double, 2>>& box) {
  const int n = chart.dim();
  const int N = static_cast<int>(nodes.size()) - 1;

  auto local = [&](int i, const std::vector<double>& cand, double& len) {
    Chord c1 = eval_chord(chart, nodes[static_cast<size_t>(i) - 1], cand);
    Chord c2 = eval_chord(chart, cand, nodes[static_cast<size_t>(i) + 1]);
    if (!chord_future_causal(c1) || !chord_future_causal(c2)) return false;
    len = chord_length_quad(chart, nodes[static_cast<size_t>(i) - 1], cand) +
          chord_length_quad(chart, cand, nodes[static_cast<size_t>(i) + 1]);
    return true;
  };

  for (int i = 1; i < N; ++i) {
    double l_old = 0;
    if (!local(i, nodes[static_cast<size_t>(i)], l_old)) continue;  // shouldn't happen
    // FD gradient of the two adjacent chord lengths
    const double seg = std::max(eucl_dist(nodes[static_cast<size_t>(i) - 1],
                                          nodes[static_cast<size_t>(i)]),
                                eucl_dist(nodes[static_cast<size_t>(i)],
                                          nodes[static_cast<size_t>(i) + 1]));
    const double hfd = std::max(1e-9, 1e-6 * seg);
    Eigen::VectorXd grad(n);
    for (int c = 0; c < n; ++c) {
      auto p = nodes[static_cast<size_t>(i)];
      double lp = l_old, lm = l_old;
      p[static_cast<size_t>(c)] += hfd;
      if (!local(i, p, lp)) lp = 0.0;  // outside the cone: objective floor
      p[static_cast<size_t>(c)] -= 2 * hfd;
      if (!local(i, p, lm)) lm = 0.0;
      grad(c) = (lp - lm) / (2 * hfd);
    }
    const double gn = grad.norm();
    if (gn < 1e-14) continue;
    double step = 0.25 * seg / gn;
    for (int halving = 0; halving < 16; ++halving, step *= 0.5) {
      auto cand = nodes[static_cast<size_t>(i)];
      bool inside = true;
      for (int c = 0; c < n; ++c) {
        cand[static_cast<size_t>(c)] += step * grad(c);
        if (cand[static_cast<size_t>(c)] < box[static_cast<size_t>(c)][0] ||
            cand[static_cast<size_t>(c)] > box[static_cast<size_t>(c)][1])
          inside = false;
      }
      if (!inside) continue;
      double l_new = 0;
      if (local(i, cand, l_new) && l_new > l_old + 1e-15) {
        nodes[static_cast<size_t>(i)] = cand;
        break;
      }
    }
  }
  return polyline_action(chart, nodes);
}

}  // namespace

CausalCurve straight_chord_curve(const MetricChart& chart, std::span<const double> x,
                                 std::span<const double> y, int segments) {
  if (segments < 1) throw ConfigError("curve needs at least one segment");
  CausalCurve c;
  const int n = chart.dim();
  for (int k = 0; k <= segments; ++k) {
    std::vector<double> node(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
      node[static_cast<size_t>(i)] =
          x[static_cast<size_t>(i)] +
          (y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)]) * k / segments;
    c.nodes.push_back(std::move(node));
  }
  refresh_chord_flags(chart, c);
  return c;
}

void refresh_chord_flags(const MetricChart& chart, CausalCurve& curve) {
  curve.chord_causal.clear();
  for (size_t k = 0; k + 1 < curve.nodes.size(); ++k)
    curve.chord_causal.push_back(
        chord_future_causal(eval_chord(chart, curve.nodes[k], curve.nodes[k + 1])) ? 1 : 0);
}

double action(const MetricChart& chart, const CausalCurve& curve) {
  double total = 0;
  for (size_t k = 0; k + 1 < curve.nodes.size(); ++k) {
    Chord c = eval_chord(chart, curve.nodes[k], curve.nodes[k + 1]);
    if (!chord_future_causal(c))
      throw NotCausal("chord " + std::to_string(k) + " is not future-causal");
    total += chord_length(c);
  }
  return total;
}

TimeSep ell_shooting(const MetricChart& chart, std::span<const double> x,
                     std::span<const double> y) {
  TimeSep out;
  out.method = TimeSepMethod::shooting;
  if (eucl_dist(x, y) < 1e-14) {
    out.value = 0.0;  // zero shooting path
    return out;
  }
  try {
    ShootResult r = shoot_bvp(chart, x, y);
    out.value = r.geod.proper_time;
    out.witness_geod = std::move(r.geod);
  } catch (const NotCausallyConnectable&) {
    out.value = kNegInf;
  }
  return out;
}

TimeSep ell_action(const MetricChart& chart, std::span<const double> x,
                   std::span<const double> y, int segments, int iters, uint64_t seed) {
  if (segments < 2) throw ConfigError("ell_action needs at least 2 segments");
  chart.require_in_domain(x);
  chart.require_in_domain(y);
  TimeSep out;
  out.method = TimeSepMethod::action;
  if (eucl_dist(x, y) < 1e-14) return out;  // value 0

  // level schedule by halving so that levels(2k) = levels(k) + {2k}
  std::vector<int> levels{segments};
  while (levels.back() > 6) levels.push_back((levels.back() + 1) / 2);
  std::reverse(levels.begin(), levels.end());

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  bool found = false;
  auto nodes = causal_initializer(chart, x, y, levels.front(), rng, found);
  if (!found) {
    out.value = kNegInf;
    return out;
  }
  const auto& box = chart.domain_box();
  double total = 0;
  for (size_t li = 0; li < levels.size(); ++li) {
    if (li > 0) nodes = resample(nodes, levels[li]);
    double prev = -1;
    for (int it = 0; it < iters; ++it) {
      total = ascent_sweep(chart, nodes, box);
      if (std::abs(total - prev) < 1e-11 * std::max(1.0, total)) break;
      prev = total;
    }
  }

  CausalCurve curve;
  curve.nodes = std::move(nodes);
  refresh_chord_flags(chart, curve);
  out.value = total;
  out.witness_curve = std::move(curve);
  return out;
}

TimeSep ell(const MetricChart& chart, std::span<const double> x,
            std::span<const double> y) {
  try {
    return ell_shooting(chart, x, y);
  } catch (const NoConvergence&) {
    return ell_action(chart, x, y);
  } catch (const StepSizeUnderflow&) {
    return ell_action(chart, x, y);
  }
}

RtiReport check_rti(const MetricChart& chart, std::span<const double> x,
                    std::span<const double> y, std::span<const double> z, double tol) {
  RtiReport r;
  r.tol = tol;
  r.l_xz = ell(chart, x, z).value;
  r.l_xy = ell(chart, x, y).value;
  r.l_yz = ell(chart, y, z).value;
  const bool vacuous = std::isinf(r.l_xy) || std::isinf(r.l_yz);
  r.slack = vacuous ? std::numeric_limits<double>::infinity()
                    : r.l_xz - (r.l_xy + r.l_yz);
  r.pass = vacuous || r.slack >= -tol;
  return r;
}

}  // namespace lorlab
