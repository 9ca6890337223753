#include "lorlab/metric.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lorlab/errors.hpp"

namespace lorlab {

namespace {

std::string point_str(std::span<const double> x) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// chart construction
// ---------------------------------------------------------------------------

MetricChart MetricChart::from_expressions(std::string name,
                                          std::vector<std::string> coords,
                                          std::vector<std::vector<std::string>> g_exprs,
                                          std::vector<std::string> tau_exprs,
                                          std::vector<std::array<double, 2>> domain,
                                          bool riemannian) {
  MetricChart c;
  c.name_ = std::move(name);
  c.n_ = static_cast<int>(coords.size());
  if (c.n_ < 2 || c.n_ > kMaxDim)
    throw ConfigError("chart \"" + c.name_ + "\": dimension must be in [2," +
                      std::to_string(kMaxDim) + "]");
  if (static_cast<int>(g_exprs.size()) != c.n_)
    throw ConfigError("chart \"" + c.name_ + "\": metric must be " +
                      std::to_string(c.n_) + "x" + std::to_string(c.n_));
  if (static_cast<int>(domain.size()) != c.n_)
    throw ConfigError("chart \"" + c.name_ + "\": domain needs one [lo,hi] per coordinate");
  for (int i = 0; i < c.n_; ++i)
    if (!(domain[static_cast<size_t>(i)][0] < domain[static_cast<size_t>(i)][1]))
      throw ConfigError("chart \"" + c.name_ + "\": empty domain interval for coordinate " +
                        coords[static_cast<size_t>(i)]);
  c.coords_ = std::move(coords);
  c.box_ = std::move(domain);
  c.riemannian_ = riemannian;
  c.gexpr_.resize(static_cast<size_t>(c.n_) * static_cast<size_t>(c.n_));
  for (int i = 0; i < c.n_; ++i) {
    if (static_cast<int>(g_exprs[static_cast<size_t>(i)].size()) != c.n_)
      throw ConfigError("chart \"" + c.name_ + "\": metric row " + std::to_string(i) +
                        " has wrong length");
    for (int j = 0; j < c.n_; ++j)
      c.gexpr_[static_cast<size_t>(i * c.n_ + j)] =
          parse_expression(g_exprs[static_cast<size_t>(i)][static_cast<size_t>(j)], c.coords_);
  }
  if (!tau_exprs.empty()) {
    if (static_cast<int>(tau_exprs.size()) != c.n_)
      throw ConfigError("chart \"" + c.name_ + "\": time_orientation needs " +
                        std::to_string(c.n_) + " entries");
    for (auto& s : tau_exprs) c.tauexpr_.push_back(parse_expression(s, c.coords_));
  }
  // sanity: symmetry + signature at the box centre
  std::vector<double> mid(static_cast<size_t>(c.n_));
  for (int i = 0; i < c.n_; ++i)
    mid[static_cast<size_t>(i)] =
        0.5 * (c.box_[static_cast<size_t>(i)][0] + c.box_[static_cast<size_t>(i)][1]);
  Eigen::MatrixXd g0 = c.components(mid);
  if ((g0 - g0.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw ConfigError("chart \"" + c.name_ + "\": metric is not symmetric at the box centre");
  validate_signature(c, mid);
  return c;
}

MetricChart MetricChart::from_callback(std::string name, int dim,
                                       std::vector<std::string> coords,
                                       ComponentFn g_fn, CovectorFn tau_fn,
                                       std::vector<std::array<double, 2>> domain,
                                       bool riemannian) {
  MetricChart c;
  c.name_ = std::move(name);
  c.n_ = dim;
  if (c.n_ < 2 || c.n_ > kMaxDim)
    throw ConfigError("chart \"" + c.name_ + "\": dimension must be in [2," +
                      std::to_string(kMaxDim) + "]");
  if (coords.empty())
    for (int i = 0; i < dim; ++i) coords.push_back("x" + std::to_string(i));
  if (static_cast<int>(coords.size()) != dim || static_cast<int>(domain.size()) != dim)
    throw ConfigError("chart \"" + c.name_ + "\": coordinate/domain arity mismatch");
  c.coords_ = std::move(coords);
  c.box_ = std::move(domain);
  c.riemannian_ = riemannian;
  c.gfn_ = std::move(g_fn);
  c.taufn_ = std::move(tau_fn);
  return c;
}

MetricChart MetricChart::euclidean(int dim) {
  std::vector<std::string> coords;
  std::vector<std::vector<std::string>> g(static_cast<size_t>(dim),
                                          std::vector<std::string>(static_cast<size_t>(dim), "0"));
  std::vector<std::array<double, 2>> box;
  for (int i = 0; i < dim; ++i) {
    coords.push_back("e" + std::to_string(i));
    g[static_cast<size_t>(i)][static_cast<size_t>(i)] = "1";
    box.push_back({-1e9, 1e9});
  }
  return from_expressions("euclidean" + std::to_string(dim) + "d", coords, g, {}, box,
                          /*riemannian=*/true);
}

namespace {

MetricChart make_builtin(const std::string& name) {
  const double T = 110.0;   // time extent for the flat charts
  const double A = 3.15;    // just covers a full angle range (-pi, pi)
  if (name == "minkowski2d")
    return MetricChart::from_expressions(name, {"t", "x"},
                                         {{"1", "0"}, {"0", "-1"}}, {},
                                         {{{-T, T}}, {{-T, T}}});
  if (name == "minkowski3d")
    return MetricChart::from_expressions(name, {"t", "x", "y"},
                                         {{"1", "0", "0"}, {"0", "-1", "0"}, {"0", "0", "-1"}},
                                         {}, {{{-T, T}}, {{-T, T}}, {{-T, T}}});
  if (name == "minkowski4d")
    return MetricChart::from_expressions(
        name, {"t", "x", "y", "z"},
        {{"1", "0", "0", "0"}, {"0", "-1", "0", "0"}, {"0", "0", "-1", "0"}, {"0", "0", "0", "-1"}},
        {}, {{{-T, T}}, {{-T, T}}, {{-T, T}}, {{-T, T}}});
  if (name == "product2d")  // R x S^1, flat
    return MetricChart::from_expressions(name, {"t", "th"},
                                         {{"1", "0"}, {"0", "-1"}}, {},
                                         {{{-T, T}}, {{-A, A}}});
  if (name == "torus3d")  // R x T^2, flat
    return MetricChart::from_expressions(name, {"t", "th1", "th2"},
                                         {{"1", "0", "0"}, {"0", "-1", "0"}, {"0", "0", "-1"}},
                                         {}, {{{-T, T}}, {{-A, A}}, {{-A, A}}});
  if (name == "sphere3d")  // R x S^2 of radius 2 (poles excluded)
    return MetricChart::from_expressions(
        name, {"t", "th", "ph"},
        {{"1", "0", "0"}, {"0", "-4", "0"}, {"0", "0", "-4*sin(th)^2"}}, {},
        {{{-T, T}}, {{0.35, 2.7915926535897932}}, {{-A, A}}});
  if (name == "desitter2d")
    return MetricChart::from_expressions(name, {"t", "th"},
                                         {{"1", "0"}, {"0", "-cosh(t)^2"}}, {},
                                         {{{-3.5, 3.5}}, {{-A, A}}});
  throw ConfigError("unknown built-in chart \"" + name + "\"");
}

}  // namespace

MetricChart MetricChart::builtin(const std::string& name) { return make_builtin(name); }

std::vector<std::string> MetricChart::builtin_names() {
  return {"minkowski2d", "minkowski3d", "minkowski4d",
          "product2d",   "torus3d",     "sphere3d",    "desitter2d"};
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

double MetricChart::fd_step(int c) const {
  return fd_h_rel * (box_[static_cast<size_t>(c)][1] - box_[static_cast<size_t>(c)][0]);
}

double MetricChart::stencil_margin(int deriv_order) const {
  if (analytic() || deriv_order == 0) return 0.0;
  double h = 0.0;
  for (int c = 0; c < n_; ++c) h = std::max(h, fd_step(c));
  return (deriv_order >= 2 ? 4.0 : 2.0) * h;
}

bool MetricChart::in_domain(std::span<const double> x, double margin) const {
  if (static_cast<int>(x.size()) != n_) return false;
  for (int i = 0; i < n_; ++i)
    if (x[static_cast<size_t>(i)] < box_[static_cast<size_t>(i)][0] + margin ||
        x[static_cast<size_t>(i)] > box_[static_cast<size_t>(i)][1] - margin)
      return false;
  return true;
}

void MetricChart::require_in_domain(std::span<const double> x, double margin) const {
  if (!in_domain(x, margin))
    throw OutOfDomain("point " + point_str(x) + " outside chart \"" + name_ +
                      "\" domain" + (margin > 0 ? " (with stencil margin)" : ""));
}

Eigen::MatrixXd MetricChart::components(std::span<const double> x) const {
  if (gfn_) return gfn_(x);
  Eigen::MatrixXd g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      const double v = gexpr_[static_cast<size_t>(i * n_ + j)]->eval(x);
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

MetricJets MetricChart::jets(std::span<const double> x, int order) const {
  MetricJets out;
  const int n = n_;
  if (analytic()) {
    out.g.resize(n, n);
    if (order >= 1) out.dg.assign(static_cast<size_t>(n), Eigen::MatrixXd::Zero(n, n));
    if (order >= 2)
      out.d2g.assign(static_cast<size_t>(n),
                     std::vector<Eigen::MatrixXd>(static_cast<size_t>(n),
                                                  Eigen::MatrixXd::Zero(n, n)));
    if (order == 0) {
      out.g = components(x);
      return out;
    }
    if (order == 1) {
      std::vector<Jet1> args;
      for (int c = 0; c < n; ++c)
        args.push_back(Jet1::variable(x[static_cast<size_t>(c)], c, n));
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          Jet1 r = gexpr_[static_cast<size_t>(i * n + j)]->eval1(args);
          out.g(i, j) = out.g(j, i) = r.v;
          for (int c = 0; c < n; ++c) {
            out.dg[static_cast<size_t>(c)](i, j) = r.g[c];
            out.dg[static_cast<size_t>(c)](j, i) = r.g[c];
          }
        }
      return out;
    }
    std::vector<Jet2> args;
    for (int c = 0; c < n; ++c)
      args.push_back(Jet2::variable(x[static_cast<size_t>(c)], c, n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Jet2 r = gexpr_[static_cast<size_t>(i * n + j)]->eval2(args);
        out.g(i, j) = out.g(j, i) = r.v;
        for (int c = 0; c < n; ++c) {
          out.dg[static_cast<size_t>(c)](i, j) = r.g[c];
          out.dg[static_cast<size_t>(c)](j, i) = r.g[c];
          for (int d = 0; d < n; ++d) {
            out.d2g[static_cast<size_t>(c)][static_cast<size_t>(d)](i, j) = r.hess(c, d);
            out.d2g[static_cast<size_t>(c)][static_cast<size_t>(d)](j, i) = r.hess(c, d);
          }
        }
      }
    return out;
  }

  // FD backend. First derivatives: 2nd-order central for order 1; curvature
  // work (order 2) upgrades everything to 4th-order stencils.
  out.g = components(x);
  if (order == 0) return out;
  std::vector<double> xp(x.begin(), x.end());
  auto at = [&](int c, double step) {
    xp[static_cast<size_t>(c)] = x[static_cast<size_t>(c)] + step;
    Eigen::MatrixXd g = components(xp);
    xp[static_cast<size_t>(c)] = x[static_cast<size_t>(c)];
    return g;
  };
  out.dg.assign(static_cast<size_t>(n), Eigen::MatrixXd::Zero(n, n));
  if (order == 1) {
    for (int c = 0; c < n; ++c) {
      const double h = fd_step(c);
      out.dg[static_cast<size_t>(c)] = (at(c, h) - at(c, -h)) / (2 * h);
    }
    return out;
  }
  // order 2: 4th-order first and second derivatives, mixed by composition.
  for (int c = 0; c < n; ++c) {
    const double h = fd_step(c);
    out.dg[static_cast<size_t>(c)] =
        (at(c, -2 * h) - 8 * at(c, -h) + 8 * at(c, h) - at(c, 2 * h)) / (12 * h);
  }
  out.d2g.assign(static_cast<size_t>(n),
                 std::vector<Eigen::MatrixXd>(static_cast<size_t>(n),
                                              Eigen::MatrixXd::Zero(n, n)));
  for (int c = 0; c < n; ++c) {
    const double h = fd_step(c);
    out.d2g[static_cast<size_t>(c)][static_cast<size_t>(c)] =
        (-at(c, -2 * h) + 16 * at(c, -h) - 30 * out.g + 16 * at(c, h) - at(c, 2 * h)) /
        (12 * h * h);
  }
  auto dg4_at = [&](int c, int d, double step_d) {
    // 4th-order d/dx_c of g, evaluated with x_d shifted by step_d
    std::vector<double> y(x.begin(), x.end());
    y[static_cast<size_t>(d)] += step_d;
    const double h = fd_step(c);
    auto gat = [&](double s) {
      std::vector<double> z = y;
      z[static_cast<size_t>(c)] += s;
      return Eigen::MatrixXd(components(z));
    };
    return Eigen::MatrixXd((gat(-2 * h) - 8 * gat(-h) + 8 * gat(h) - gat(2 * h)) / (12 * h));
  };
  for (int c = 0; c < n; ++c)
    for (int d = c + 1; d < n; ++d) {
      const double hd = fd_step(d);
      Eigen::MatrixXd m =
          (dg4_at(c, d, -2 * hd) - 8 * dg4_at(c, d, -hd) + 8 * dg4_at(c, d, hd) -
           dg4_at(c, d, 2 * hd)) /
          (12 * hd);
      out.d2g[static_cast<size_t>(c)][static_cast<size_t>(d)] = m;
      out.d2g[static_cast<size_t>(d)][static_cast<size_t>(c)] = m;
    }
  return out;
}

Eigen::VectorXd MetricChart::time_orientation(std::span<const double> x) const {
  if (taufn_) return taufn_(x);
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(n_);
  if (!tauexpr_.empty()) {
    for (int i = 0; i < n_; ++i) tau(i) = tauexpr_[static_cast<size_t>(i)]->eval(x);
    return tau;
  }
  tau(0) = 1.0;
  return tau;
}

MetricEval eval_metric(const MetricChart& chart, std::span<const double> x) {
  chart.require_in_domain(x);
  MetricEval m;
  m.g = chart.components(x);
  const double det = m.g.determinant();
  if (std::abs(det) < 1e-12)
    throw SingularMetric("chart \"" + chart.name() + "\" at " + point_str(x) +
                         ": |det g| = " + std::to_string(std::abs(det)));
  m.g_inv = m.g.inverse();
  m.sqrt_abs_det = std::sqrt(std::abs(det));
  return m;
}

void validate_signature(const MetricChart& chart, std::span<const double> x) {
  Eigen::MatrixXd g = chart.components(x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const auto& ev = es.eigenvalues();
  int pos = 0, neg = 0;
  for (int i = 0; i < g.rows(); ++i) {
    if (ev(i) > 1e-12) ++pos;
    else if (ev(i) < -1e-12) ++neg;
  }
  const int n = static_cast<int>(g.rows());
  const bool ok = chart.riemannian() ? (pos == n) : (pos == 1 && neg == n - 1);
  if (!ok)
    throw SingularMetric("chart \"" + chart.name() + "\" at " + point_str(x) +
                         ": eigenvalue signature is not " +
                         (chart.riemannian() ? "Riemannian" : "(+,-,...,-)"));
}

// ---------------------------------------------------------------------------
// Christoffel and curvature
// ---------------------------------------------------------------------------

std::vector<Eigen::MatrixXd> christoffel_from_jets(const MetricJets& J,
                                                   const Eigen::MatrixXd& g_inv) {
  const int n = static_cast<int>(J.g.rows());
  std::vector<Eigen::MatrixXd> Gam(static_cast<size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double s = 0;
        for (int k = 0; k < n; ++k)
          s += g_inv(l, k) * (J.dg[static_cast<size_t>(i)](k, j) +
                              J.dg[static_cast<size_t>(j)](k, i) -
                              J.dg[static_cast<size_t>(k)](i, j));
        Gam[static_cast<size_t>(l)](i, j) = 0.5 * s;
        Gam[static_cast<size_t>(l)](j, i) = 0.5 * s;
      }
  return Gam;
}

std::vector<Eigen::MatrixXd> christoffel(const MetricChart& chart,
                                         std::span<const double> x) {
  chart.require_in_domain(x, chart.stencil_margin(1));
  MetricJets J = chart.jets(x, 1);
  const double det = J.g.determinant();
  if (std::abs(det) < 1e-12)
    throw SingularMetric("chart \"" + chart.name() + "\" at " + point_str(x));
  return christoffel_from_jets(J, J.g.inverse());
}

Curvature curvature(const MetricChart& chart, std::span<const double> x) {
  chart.require_in_domain(x, chart.stencil_margin(2));
  const int n = chart.dim();
  MetricJets J = chart.jets(x, 2);
  const double det = J.g.determinant();
  if (std::abs(det) < 1e-12)
    throw SingularMetric("chart \"" + chart.name() + "\" at " + point_str(x));
  Eigen::MatrixXd gi = J.g.inverse();
  auto Gam = christoffel_from_jets(J, gi);

  // dGam[c][l](i,j) = d_c Gamma^l_ij, assembled from dg and d2g:
  //   Gamma^l_ij = (1/2) g^{lk} S_kij,  S_kij = d_i g_kj + d_j g_ki - d_k g_ij
  //   d_c g^{lk} = -(g^{-1} dg_c g^{-1})^{lk}
  std::vector<std::vector<Eigen::MatrixXd>> dGam(
      static_cast<size_t>(n),
      std::vector<Eigen::MatrixXd>(static_cast<size_t>(n), Eigen::MatrixXd::Zero(n, n)));
  for (int c = 0; c < n; ++c) {
    Eigen::MatrixXd dgi = -gi * J.dg[static_cast<size_t>(c)] * gi;
    for (int l = 0; l < n; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double s = 0;
          for (int k = 0; k < n; ++k) {
            const double S = J.dg[static_cast<size_t>(i)](k, j) +
                             J.dg[static_cast<size_t>(j)](k, i) -
                             J.dg[static_cast<size_t>(k)](i, j);
            const double dS = J.d2g[static_cast<size_t>(c)][static_cast<size_t>(i)](k, j) +
                              J.d2g[static_cast<size_t>(c)][static_cast<size_t>(j)](k, i) -
                              J.d2g[static_cast<size_t>(c)][static_cast<size_t>(k)](i, j);
            s += dgi(l, k) * S + gi(l, k) * dS;
          }
          dGam[static_cast<size_t>(c)][static_cast<size_t>(l)](i, j) = 0.5 * s;
          dGam[static_cast<size_t>(c)][static_cast<size_t>(l)](j, i) = 0.5 * s;
        }
  }

  // R^l_{kij} = d_i Gam^l_jk - d_j Gam^l_ik + Gam^l_{i lam} Gam^lam_{jk}
  //             - Gam^l_{j lam} Gam^lam_{ik}
  Curvature out;
  out.n = n;
  out.riemann.assign(static_cast<size_t>(n * n * n * n), 0.0);
  out.ricci = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double r = dGam[static_cast<size_t>(i)][static_cast<size_t>(l)](j, k) -
                     dGam[static_cast<size_t>(j)][static_cast<size_t>(l)](i, k);
          for (int lam = 0; lam < n; ++lam)
            r += Gam[static_cast<size_t>(l)](i, lam) * Gam[static_cast<size_t>(lam)](j, k) -
                 Gam[static_cast<size_t>(l)](j, lam) * Gam[static_cast<size_t>(lam)](i, k);
          out.riemann[static_cast<size_t>(((l * n + k) * n + i) * n + j)] = r;
        }
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double s = 0;
      for (int l = 0; l < n; ++l) s += out.riem(l, k, l, j);
      out.ricci(k, j) = s;
    }
  out.ricci = 0.5 * (out.ricci + out.ricci.transpose().eval());
  return out;
}

Eigen::MatrixXd ricci(const MetricChart& chart, std::span<const double> x) {
  return curvature(chart, x).ricci;
}

// ---------------------------------------------------------------------------
// causal classification
// ---------------------------------------------------------------------------

CausalClass classify(const MetricChart& chart, std::span<const double> x,
                     std::span<const double> v) {
  chart.require_in_domain(x);
  const int n = chart.dim();
  double e2 = 0;
  for (int i = 0; i < n; ++i) e2 += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
  CausalClass out;
  if (e2 == 0.0) return out;  // zero vector
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), n);
  Eigen::MatrixXd g = chart.components(x);
  out.norm2 = vv.dot(g * vv);
  const double band = 1e-9 * e2;
  if (out.norm2 > band) out.tag = CausalTag::timelike;
  else if (out.norm2 < -band) out.tag = CausalTag::spacelike;
  else out.tag = CausalTag::null_like;
  if (out.tag == CausalTag::timelike || out.tag == CausalTag::null_like) {
    const double tv = chart.time_orientation(x).dot(vv);
    out.direction = tv >= 0 ? CausalDir::future : CausalDir::past;
  }
  return out;
}

double lorentz_norm_vector(const MetricChart& chart, std::span<const double> x,
                           std::span<const double> v) {
  CausalClass c = classify(chart, x, v);
  if (c.tag != CausalTag::timelike || c.direction != CausalDir::future)
    throw NotTimelikeFuture("vector at " + point_str(x) + " has g(v,v) = " +
                            std::to_string(c.norm2));
  return std::sqrt(c.norm2);
}

double lorentz_norm_covector(const MetricChart& chart, std::span<const double> x,
                             std::span<const double> w) {
  MetricEval m = eval_metric(chart, x);
  Eigen::Map<const Eigen::VectorXd> ww(w.data(), chart.dim());
  Eigen::VectorXd v = m.g_inv * ww;
  CausalClass c = classify(chart, x, std::span<const double>(v.data(),
                                                             static_cast<size_t>(v.size())));
  if (c.tag != CausalTag::timelike || c.direction != CausalDir::future)
    throw NotTimelikeFuture("covector at " + point_str(x) + " has |w|^2 = " +
                            std::to_string(c.norm2));
  return std::sqrt(ww.dot(v));
}

// ---------------------------------------------------------------------------
// JSON metric-spec loading
// ---------------------------------------------------------------------------

MetricChart chart_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("metric-spec parse failure: ") + e.what());
  }
  try {
    const std::string name = j.at("name").get<std::string>();
    const int dim = j.at("dimension").get<int>();
    auto coords = j.at("coordinates").get<std::vector<std::string>>();
    auto metric = j.at("metric").get<std::vector<std::vector<std::string>>>();
    std::vector<std::string> tau;
    if (j.contains("time_orientation"))
      tau = j.at("time_orientation").get<std::vector<std::string>>();
    auto dom = j.at("domain").get<std::vector<std::array<double, 2>>>();
    if (static_cast<int>(coords.size()) != dim)
      throw ConfigError("metric-spec \"" + name + "\": dimension/coordinates mismatch");
    return MetricChart::from_expressions(name, coords, metric, tau, dom);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("metric-spec field error: ") + e.what());
  }
}

MetricChart chart_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metric-spec file \"" + path + "\"");
  std::stringstream ss;
  ss << in.rdbuf();
  return chart_from_json_text(ss.str());
}

MetricChart resolve_chart(const std::string& name_or_path) {
  for (const auto& b : MetricChart::builtin_names())
    if (b == name_or_path) return MetricChart::builtin(name_or_path);
  return chart_from_json_file(name_or_path);
}

}  // namespace lorlab
