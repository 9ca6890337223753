#include "lorlab/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <random>
#include <sstream>

#include "json.hpp"
#include "lorlab/errors.hpp"
#include "lorlab/geodesic.hpp"

namespace lorlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string point_str(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
}

// Unit raised gradient of the Busemann limit at x; checks the future cone.
// The finite-difference db+ carries the extrapolation defect |db|^2 - 1
// (reported through raw_norm2); the continuum normal is exactly unit, so
// the returned vector is renormalized before it feeds the exponential map.
Eigen::VectorXd raised_normal(BusemannField& field, std::span<const double> x,
                              double fd_h, const MetricEval& m,
                              double* raw_norm2 = nullptr) {
  const MetricChart& chart = *field.line().chart;
  std::vector<double> db = gradient_fd(field, x, fd_h);
  Eigen::VectorXd dbv = to_vec(db);
  Eigen::VectorXd N = m.g_inv * dbv;
  const double n2 = dbv.dot(N);
  Eigen::VectorXd tau = chart.time_orientation(x);
  if (!(n2 > 0.0) || dbv.dot(tau) <= 0.0)
    throw NotTimelikeFuture("Busemann gradient at " + point_str(x) +
                            " is not future timelike (|db|^2 = " +
                            std::to_string(n2) + ")");
  if (raw_norm2) *raw_norm2 = n2;
  return N / std::sqrt(n2);
}

// Riemannian flip of g along the unit future gradient: g~ = 2 w w^T - g
// (lower indices), inverse 2 n n^T - g^{-1} with n the raised unit gradient.
double hessian_flip_norm(const Eigen::MatrixXd& hess_cov,
                         const Eigen::VectorXd& du, const MetricEval& m) {
  Eigen::VectorXd du_up = m.g_inv * du;
  const double n2 = du.dot(du_up);
  Eigen::VectorXd n_hat = du_up / std::sqrt(n2);
  Eigen::MatrixXd flip_inv = 2.0 * n_hat * n_hat.transpose() - m.g_inv;
  Eigen::MatrixXd M = flip_inv * hess_cov;
  return std::sqrt(std::max(0.0, (M * M).trace()));
}

}  // namespace

// ---------------------------------------------------------------------------
// Hessian norm of a scalar field

double hessian_norm_field(const MetricChart& chart, const ScalarFieldSample& u,
                          const Box& region, double h, int samples,
                          std::uint64_t seed) {
  if (static_cast<int>(region.size()) != chart.dim())
    throw ConfigError("region dimension mismatch");
  if (samples < 1) throw ConfigError("hessian_norm_field needs samples >= 1");
  const int n = chart.dim();
  // Keep the 9-point stencil inside the region.
  std::vector<std::array<double, 2>> inner(region.begin(), region.end());
  for (auto& ax : inner) {
    const double margin = std::min(2.0 * h, 0.45 * (ax[1] - ax[0]));
    ax[0] += margin;
    ax[1] -= margin;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int si = 0; si < samples; ++si) {
    std::vector<double> x(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
      const double t = (si == 0) ? 0.5 : uni(rng);
      x[static_cast<size_t>(c)] = inner[static_cast<size_t>(c)][0] +
          t * (inner[static_cast<size_t>(c)][1] - inner[static_cast<size_t>(c)][0]);
    }
    chart.require_in_domain(x, 2.0 * h);
    MetricEval m = eval_metric(chart, x);
    std::vector<double> g = u.gradient(x, h);
    Eigen::VectorXd du = to_vec(g);
    Eigen::VectorXd du_up = m.g_inv * du;
    const double n2 = du.dot(du_up);
    Eigen::VectorXd tau = chart.time_orientation(x);
    if (!(n2 > 0.0) || du.dot(tau) <= 0.0)
      throw NotTimelikeFuture("du at " + point_str(x) +
                              " is not future timelike");
    Eigen::MatrixXd hess = u.hessian(x, h);
    std::vector<Eigen::MatrixXd> Gam = christoffel(chart, x);
    for (int k = 0; k < n; ++k)
      hess -= g[static_cast<size_t>(k)] * Gam[static_cast<size_t>(k)];
    if (!hess.allFinite())
      throw NotConverged("field is not finite on the Hessian stencil at " +
                         point_str(x));
    worst = std::max(worst, hessian_flip_norm(hess, du, m));
  }
  return worst;
}

double hessian_norm_field(BusemannField& field, const Box& region, double h,
                          int samples, std::uint64_t seed) {
  ScalarFieldSample u{
      [&field](std::span<const double> x) {
        return busemann_limit(field, x).limit;
      },
      ScalarFieldSample::Provenance::busemann_limit};
  return hessian_norm_field(*field.line().chart, u, region, h, samples, seed);
}

// ---------------------------------------------------------------------------
// Level-set projection and frame assembly

std::vector<double> project_to_level_set(BusemannField& field,
                                         std::span<const double> seed,
                                         double tol, double fd_h,
                                         int max_iter) {
  const MetricChart& chart = *field.line().chart;
  std::vector<double> x(seed.begin(), seed.end());
  for (int it = 0; it < max_iter; ++it) {
    const double b = busemann_limit(field, x).limit;
    if (!std::isfinite(b))
      throw NewtonFail("Busemann value not finite at " + point_str(x));
    if (std::abs(b) <= tol) return x;
    MetricEval m = eval_metric(chart, x);
    std::vector<double> db = gradient_fd(field, x, fd_h);
    Eigen::VectorXd dbv = to_vec(db);
    Eigen::VectorXd N = m.g_inv * dbv;
    const double slope = dbv.dot(N);
    if (!(slope > 1e-12))
      throw NewtonFail("degenerate Busemann gradient at " + point_str(x));
    const double step = -b / slope;
    for (int c = 0; c < chart.dim(); ++c) x[static_cast<size_t>(c)] += step * N(c);
    if (!chart.in_domain(x))
      throw NewtonFail("level-set Newton left the chart at " + point_str(x));
  }
  throw NewtonFail("level-set Newton did not reach |b| <= " +
                   std::to_string(tol) + " from " + point_str(seed));
}

SplitFrame build_level_set(BusemannField& field,
                           const std::vector<std::vector<double>>& seeds,
                           double tol, double fd_h) {
  if (field.direction() != BusemannDirection::forward)
    throw ConfigError("build_level_set needs the forward Busemann field");
  SplitFrame frame;
  frame.chart = field.line().chart;
  frame.field = &field;
  frame.line = field.line();
  frame.fd_h = fd_h;
  const int n = frame.chart->dim();
  frame.min_induced_eig = kInf;
  for (const auto& seed : seeds) {
    std::vector<double> x;
    try {
      x = project_to_level_set(field, seed, tol, fd_h);
    } catch (const NewtonFail& e) {
      std::fprintf(stderr, "[build_level_set] dropping seed %s: %s\n",
                   point_str(seed).c_str(), e.what());
      ++frame.dropped_seeds;
      continue;
    }
    MetricEval m = eval_metric(*frame.chart, x);
    double raw_n2 = 1.0;
    Eigen::VectorXd N = raised_normal(field, x, fd_h, m, &raw_n2);
    Eigen::VectorXd db = m.g * N;  // unit covector after renormalization
    frame.max_normal_dev =
        std::max(frame.max_normal_dev, std::abs(raw_n2 - 1.0));
    // Spatial coordinate axes projected off the normal: <db, T_a> = 0.
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n - 1);
    for (int a = 1; a < n; ++a) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(a) = 1.0;
      T.col(a - 1) = e - db(a) * N;
    }
    Eigen::MatrixXd h_ind = -(T.transpose() * m.g * T);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_ind);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw SingularMetric("induced level-set metric not positive definite at " +
                           point_str(x));
    frame.min_induced_eig =
        std::min(frame.min_induced_eig, es.eigenvalues().minCoeff());
    frame.points.push_back(std::move(x));
    frame.b_residual.push_back(busemann_limit(field, frame.points.back()).limit);
    frame.normal.push_back(std::move(N));
    frame.tangent.push_back(std::move(T));
    frame.induced_h.push_back(std::move(h_ind));
  }
  if (frame.points.empty())
    throw NewtonFail("level-set projection failed for every seed");
  return frame;
}

std::string SplitFrame::to_json() const {
  nlohmann::json j;
  j["chart"] = chart ? chart->name() : "";
  j["point_count"] = points.size();
  j["dropped_seeds"] = dropped_seeds;
  j["max_normal_dev"] = max_normal_dev;
  j["min_induced_eig"] = min_induced_eig;
  j["points"] = points;
  auto dump_vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json normals = nlohmann::json::array();
  for (const auto& N : normal) normals.push_back(dump_vec(N));
  j["normals"] = normals;
  nlohmann::json hs = nlohmann::json::array();
  for (const auto& h : induced_h) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < h.rows(); ++r)
      rows.push_back(std::vector<double>(h.row(r).begin(), h.row(r).end()));
    hs.push_back(rows);
  }
  j["induced_h"] = hs;
  j["b_residual"] = b_residual;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// The candidate product map E(r, x) = exp_x(r N)

std::vector<double> splitting_map(const SplitFrame& frame, double r, int k) {
  if (k < 0 || k >= static_cast<int>(frame.points.size()))
    throw ConfigError("splitting_map: level-set index out of range");
  if (r == 0.0) return frame.points[static_cast<size_t>(k)];
  Eigen::VectorXd v = r * frame.normal[static_cast<size_t>(k)];
  std::vector<double> vv(v.data(), v.data() + v.size());
  return exp_map(*frame.chart, frame.points[static_cast<size_t>(k)], vv, 1e-10);
}

std::vector<double> splitting_map_at(const SplitFrame& frame, double r,
                                     std::span<const double> x_on_level_set) {
  std::vector<double> x(x_on_level_set.begin(), x_on_level_set.end());
  if (r == 0.0) return x;
  MetricEval m = eval_metric(*frame.chart, x);
  Eigen::VectorXd N = raised_normal(*frame.field, x, frame.fd_h, m);
  Eigen::VectorXd v = r * N;
  std::vector<double> vv(v.data(), v.data() + v.size());
  return exp_map(*frame.chart, x, vv, 1e-10);
}

// ---------------------------------------------------------------------------
// Pullback metric check

namespace {

// Derivative of s -> E(r + s*dr, P(x + s * T c)) at s = 0.
Eigen::VectorXd map_differential(const SplitFrame& frame, int k, double r,
                                 double dr, const Eigen::VectorXd& c,
                                 double eps) {
  const auto& x0 = frame.points[static_cast<size_t>(k)];
  const Eigen::MatrixXd& T = frame.tangent[static_cast<size_t>(k)];
  const int n = frame.chart->dim();
  Eigen::VectorXd dir = T * c;
  auto eval_side = [&](double s) {
    std::vector<double> xs(x0.begin(), x0.end());
    for (int i = 0; i < n; ++i) xs[static_cast<size_t>(i)] += s * dir(i);
    if (dir.norm() > 0.0)
      xs = project_to_level_set(*frame.field, xs, 1e-10, frame.fd_h);
    return splitting_map_at(frame, r + s * dr, xs);
  };
  std::vector<double> plus = eval_side(eps);
  std::vector<double> minus = eval_side(-eps);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i)
    out(i) = (plus[static_cast<size_t>(i)] - minus[static_cast<size_t>(i)]) /
             (2.0 * eps);
  return out;
}

}  // namespace

PullbackReport pullback_metric_check(const SplitFrame& frame,
                                     std::span<const double> r_list,
                                     int pair_samples, double tol,
                                     std::uint64_t seed, double fd_eps) {
  const int n = frame.chart->dim();
  const int m_t = n - 1;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  PullbackReport rep;
  rep.tol = tol;
  int base = 0;
  const int npts = static_cast<int>(frame.points.size());
  auto check_pair = [&](double r, int k, double dr1, const Eigen::VectorXd& c1,
                        double dr2, const Eigen::VectorXd& c2) {
    Eigen::VectorXd d1 = map_differential(frame, k, r, dr1, c1, fd_eps);
    Eigen::VectorXd d2 = map_differential(frame, k, r, dr2, c2, fd_eps);
    std::vector<double> center = splitting_map(frame, r, k);
    MetricEval m = eval_metric(*frame.chart, center);
    const double lhs = d1.dot(m.g * d2);
    const double rhs =
        dr1 * dr2 - c1.dot(frame.induced_h[static_cast<size_t>(k)] * c2);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(lhs - rhs));
    ++rep.pairs;
  };
  for (double r : r_list) {
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(m_t);
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(m_t);
    e0(0) = 1.0;
    // Deterministic pure-r, mixed cross, and pure-tangent pairs.
    check_pair(r, base % npts, 1.0, zero, 1.0, zero);
    check_pair(r, (base + 1) % npts, 1.0, zero, 0.0, e0);
    check_pair(r, (base + 2) % npts, 0.0, e0, 0.0, e0);
    for (int s = 0; s < pair_samples; ++s) {
      const int k = (base + 3 + s) % npts;
      Eigen::VectorXd c1(m_t), c2(m_t);
      for (int a = 0; a < m_t; ++a) {
        c1(a) = uni(rng);
        c2(a) = uni(rng);
      }
      check_pair(r, k, uni(rng), c1, uni(rng), c2);
    }
    ++base;
  }
  rep.pass = rep.max_deviation <= tol;
  return rep;
}

std::string PullbackReport::to_json() const {
  nlohmann::json j;
  j["pairs"] = pairs;
  j["max_deviation"] = max_deviation;
  j["tol"] = tol;
  j["pass"] = pass;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Intrinsic level-set distance and the product time-separation formula

namespace {

double chord_length(const MetricChart& chart, std::span<const double> a,
                    std::span<const double> b) {
  const int n = chart.dim();
  std::vector<double> mid(static_cast<size_t>(n));
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i) {
    mid[static_cast<size_t>(i)] = 0.5 * (a[static_cast<size_t>(i)] + b[static_cast<size_t>(i)]);
    d(i) = b[static_cast<size_t>(i)] - a[static_cast<size_t>(i)];
  }
  MetricEval m = eval_metric(chart, mid);
  return std::sqrt(std::max(0.0, -d.dot(m.g * d)));
}

}  // namespace

double level_set_distance(const SplitFrame& frame, int i, int j,
                          int k_neighbors, int refine_levels) {
  const int npts = static_cast<int>(frame.points.size());
  if (i < 0 || i >= npts || j < 0 || j >= npts)
    throw ConfigError("level_set_distance: index out of range");
  if (i == j) return 0.0;
  if (npts < 2) throw ConfigError("level_set_distance needs >= 2 points");
  // k-nearest-neighbor chord graph (undirected union).
  const int k_use = std::min(k_neighbors, npts - 1);
  std::vector<std::vector<std::pair<int, double>>> adj(
      static_cast<size_t>(npts));
  for (int a = 0; a < npts; ++a) {
    std::vector<std::pair<double, int>> dist;
    dist.reserve(static_cast<size_t>(npts) - 1);
    for (int b = 0; b < npts; ++b) {
      if (b == a) continue;
      dist.emplace_back(chord_length(*frame.chart,
                                     frame.points[static_cast<size_t>(a)],
                                     frame.points[static_cast<size_t>(b)]),
                        b);
    }
    std::partial_sort(dist.begin(), dist.begin() + k_use, dist.end());
    for (int q = 0; q < k_use; ++q) {
      adj[static_cast<size_t>(a)].emplace_back(dist[static_cast<size_t>(q)].second,
                                               dist[static_cast<size_t>(q)].first);
      adj[static_cast<size_t>(dist[static_cast<size_t>(q)].second)].emplace_back(
          a, dist[static_cast<size_t>(q)].first);
    }
  }
  // Dijkstra i -> j with path recovery.
  std::vector<double> best(static_cast<size_t>(npts), kInf);
  std::vector<int> prev(static_cast<size_t>(npts), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  best[static_cast<size_t>(i)] = 0.0;
  pq.emplace(0.0, i);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > best[static_cast<size_t>(u)]) continue;
    if (u == j) break;
    for (auto [v, w] : adj[static_cast<size_t>(u)]) {
      if (d + w < best[static_cast<size_t>(v)] - 1e-15) {
        best[static_cast<size_t>(v)] = d + w;
        prev[static_cast<size_t>(v)] = u;
        pq.emplace(d + w, v);
      }
    }
  }
  if (!std::isfinite(best[static_cast<size_t>(j)]))
    throw NotConverged("level-set neighbor graph is disconnected");
  std::vector<std::vector<double>> path;
  for (int v = j; v != -1; v = prev[static_cast<size_t>(v)])
    path.push_back(frame.points[static_cast<size_t>(v)]);
  std::reverse(path.begin(), path.end());
  // Refine: project edge midpoints back onto the level set and re-sum.
  for (int lvl = 0; lvl < refine_levels; ++lvl) {
    std::vector<std::vector<double>> fine;
    fine.reserve(path.size() * 2);
    for (size_t q = 0; q + 1 < path.size(); ++q) {
      fine.push_back(path[q]);
      std::vector<double> mid(path[q].size());
      for (size_t c = 0; c < mid.size(); ++c)
        mid[c] = 0.5 * (path[q][c] + path[q + 1][c]);
      fine.push_back(project_to_level_set(*frame.field, mid, 1e-10, frame.fd_h));
    }
    fine.push_back(path.back());
    path = std::move(fine);
  }
  double total = 0.0;
  for (size_t q = 0; q + 1 < path.size(); ++q)
    total += chord_length(*frame.chart, path[q], path[q + 1]);
  return total;
}

ProductTimesepReport product_timesep_check(const SplitFrame& frame, double s,
                                           int i, double t, int j,
                                           double tol) {
  ProductTimesepReport rep;
  rep.tol = tol;
  rep.d_h = level_set_distance(frame, i, j);
  std::vector<double> Ei = splitting_map(frame, s, i);
  std::vector<double> Ej = splitting_map(frame, t, j);
  rep.lhs = ell(*frame.chart, Ei, Ej).value;
  const double dt = t - s;
  rep.rhs = (dt >= rep.d_h) ? std::sqrt(std::max(0.0, dt * dt - rep.d_h * rep.d_h))
                            : -kInf;
  rep.both_infinite = std::isinf(rep.lhs) && rep.lhs < 0.0 &&
                      std::isinf(rep.rhs) && rep.rhs < 0.0;
  rep.inequality_ok = (rep.rhs == -kInf) || (rep.lhs >= rep.rhs - tol);
  if (std::isfinite(rep.lhs) && std::isfinite(rep.rhs)) {
    rep.deviation = std::abs(rep.lhs - rep.rhs);
    rep.equality_ok = rep.deviation <= tol;
  } else {
    rep.deviation = 0.0;
    rep.equality_ok = rep.both_infinite;
  }
  rep.pass = rep.inequality_ok && rep.equality_ok;
  return rep;
}

namespace {
// JSON has no literal for infinities; encode them as strings.
nlohmann::json json_extended(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "+inf" : "-inf";
}
}  // namespace

std::string ProductTimesepReport::to_json() const {
  nlohmann::json j;
  j["lhs"] = json_extended(lhs);
  j["rhs"] = json_extended(rhs);
  j["d_h"] = d_h;
  j["both_infinite"] = both_infinite;
  j["deviation"] = deviation;
  j["inequality_ok"] = inequality_ok;
  j["equality_ok"] = equality_ok;
  j["tol"] = tol;
  j["pass"] = pass;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Parallelism of the normal and the second fundamental form

double normal_parallel_deviation(const SplitFrame& frame, int k,
                                 std::span<const double> r_list, double eps) {
  if (k < 0 || k >= static_cast<int>(frame.points.size()))
    throw ConfigError("normal_parallel_deviation: index out of range");
  const int n = frame.chart->dim();
  double worst = 0.0;
  for (double r : r_list) {
    std::vector<double> c0 = splitting_map(frame, r, k);
    std::vector<double> cp = splitting_map(frame, r + eps, k);
    std::vector<double> cm = splitting_map(frame, r - eps, k);
    Eigen::VectorXd xdot(n), dN(n);
    MetricEval mp = eval_metric(*frame.chart, cp);
    MetricEval mm = eval_metric(*frame.chart, cm);
    MetricEval m0 = eval_metric(*frame.chart, c0);
    Eigen::VectorXd Np = raised_normal(*frame.field, cp, frame.fd_h, mp);
    Eigen::VectorXd Nm = raised_normal(*frame.field, cm, frame.fd_h, mm);
    Eigen::VectorXd N0 = raised_normal(*frame.field, c0, frame.fd_h, m0);
    for (int c = 0; c < n; ++c) {
      xdot(c) = (cp[static_cast<size_t>(c)] - cm[static_cast<size_t>(c)]) /
                (2.0 * eps);
      dN(c) = (Np(c) - Nm(c)) / (2.0 * eps);
    }
    std::vector<Eigen::MatrixXd> Gam = christoffel(*frame.chart, c0);
    Eigen::VectorXd cov = dN;
    for (int a = 0; a < n; ++a)
      cov(a) += xdot.dot(Gam[static_cast<size_t>(a)] * N0);
    worst = std::max(worst, cov.norm());
  }
  return worst;
}

double second_fundamental_form_norm(const SplitFrame& frame, int k,
                                    double eps) {
  if (k < 0 || k >= static_cast<int>(frame.points.size()))
    throw ConfigError("second_fundamental_form_norm: index out of range");
  const int n = frame.chart->dim();
  const auto& x0 = frame.points[static_cast<size_t>(k)];
  const Eigen::MatrixXd& T = frame.tangent[static_cast<size_t>(k)];
  MetricEval m0 = eval_metric(*frame.chart, x0);
  Eigen::VectorXd N0 = raised_normal(*frame.field, x0, frame.fd_h, m0);
  std::vector<Eigen::MatrixXd> Gam = christoffel(*frame.chart, x0);
  double worst = 0.0;
  for (int a = 0; a < n - 1; ++a) {
    std::vector<double> xp(x0.begin(), x0.end()), xm(x0.begin(), x0.end());
    for (int c = 0; c < n; ++c) {
      xp[static_cast<size_t>(c)] += eps * T(c, a);
      xm[static_cast<size_t>(c)] -= eps * T(c, a);
    }
    MetricEval mp = eval_metric(*frame.chart, xp);
    MetricEval mm = eval_metric(*frame.chart, xm);
    Eigen::VectorXd Np = raised_normal(*frame.field, xp, frame.fd_h, mp);
    Eigen::VectorXd Nm = raised_normal(*frame.field, xm, frame.fd_h, mm);
    Eigen::VectorXd cov = (Np - Nm) / (2.0 * eps);
    for (int c = 0; c < n; ++c)
      cov(c) += T.col(a).dot(Gam[static_cast<size_t>(c)] * N0);
    for (int b = 0; b < n - 1; ++b)
      worst = std::max(worst, std::abs(cov.dot(m0.g * T.col(b))));
  }
  return worst;
}

}  // namespace lorlab
