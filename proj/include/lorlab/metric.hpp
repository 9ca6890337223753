#pragma once
// Coordinate charts carrying a Lorentzian metric of signature (+,-,...,-):
// evaluation of g, g^{-1}, sqrt|det g|, Christoffel symbols, Riemann/Ricci
// curvature, causal classification of vectors, and chart construction from
// expression strings (exact derivatives via forward-mode jets), C++
// callbacks (finite differences), built-in names, or a JSON metric spec.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lorlab/expr.hpp"

namespace lorlab {

enum class CausalTag { timelike, null_like, spacelike, zero };
enum class CausalDir { future, past, none };

struct CausalClass {
  CausalTag tag = CausalTag::zero;
  CausalDir direction = CausalDir::none;
  double norm2 = 0.0;  // g(v,v)
};

// g and its coordinate derivatives at one point.
struct MetricJets {
  Eigen::MatrixXd g;                              // g_ij
  std::vector<Eigen::MatrixXd> dg;                // dg[c](i,j) = d_c g_ij
  std::vector<std::vector<Eigen::MatrixXd>> d2g;  // d2g[c][d](i,j), symmetric in (c,d)
};

class MetricChart {
 public:
  using ComponentFn = std::function<Eigen::MatrixXd(std::span<const double>)>;
  using CovectorFn = std::function<Eigen::VectorXd(std::span<const double>)>;

  static MetricChart from_expressions(std::string name,
                                      std::vector<std::string> coords,
                                      std::vector<std::vector<std::string>> g_exprs,
                                      std::vector<std::string> tau_exprs,
                                      std::vector<std::array<double, 2>> domain,
                                      bool riemannian = false);
  static MetricChart from_callback(std::string name, int dim,
                                   std::vector<std::string> coords,
                                   ComponentFn g_fn, CovectorFn tau_fn,
                                   std::vector<std::array<double, 2>> domain,
                                   bool riemannian = false);
  static MetricChart builtin(const std::string& name);
  static std::vector<std::string> builtin_names();
  static MetricChart euclidean(int dim);  // auxiliary Riemannian chart

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  const std::vector<std::string>& coordinates() const { return coords_; }
  const std::vector<std::array<double, 2>>& domain_box() const { return box_; }
  bool analytic() const { return !gexpr_.empty(); }
  bool riemannian() const { return riemannian_; }

  // FD step for coordinate c: fd_h_rel * (box width of c).
  double fd_step(int c) const;
  double fd_h_rel = 1e-4;

  bool in_domain(std::span<const double> x, double margin = 0.0) const;
  void require_in_domain(std::span<const double> x, double margin = 0.0) const;
  // Margin needed so that curvature stencils stay inside the box.
  double stencil_margin(int deriv_order) const;

  Eigen::MatrixXd components(std::span<const double> x) const;
  MetricJets jets(std::span<const double> x, int order) const;
  Eigen::VectorXd time_orientation(std::span<const double> x) const;

 private:
  std::string name_;
  int n_ = 0;
  std::vector<std::string> coords_;
  std::vector<std::array<double, 2>> box_;
  bool riemannian_ = false;
  std::vector<ExprPtr> gexpr_;    // row-major n*n
  std::vector<ExprPtr> tauexpr_;  // empty -> tau = dx^0
  ComponentFn gfn_;
  CovectorFn taufn_;
};

struct MetricEval {
  Eigen::MatrixXd g, g_inv;
  double sqrt_abs_det = 0.0;
};

// g, its inverse and volume density. Throws OutOfDomain / SingularMetric.
MetricEval eval_metric(const MetricChart& chart, std::span<const double> x);

// Checks the (+,-,...,-) eigenvalue signature at x (or all-positive for a
// Riemannian chart). Throws SingularMetric on failure.
void validate_signature(const MetricChart& chart, std::span<const double> x);

// Gam[k](i,j) = Gamma^k_ij (symmetric in i,j).
std::vector<Eigen::MatrixXd> christoffel(const MetricChart& chart,
                                         std::span<const double> x);
// Same assembly from precomputed jets; no domain checking (integrator RHS).
std::vector<Eigen::MatrixXd> christoffel_from_jets(const MetricJets& J,
                                                   const Eigen::MatrixXd& g_inv);

struct Curvature {
  int n = 0;
  std::vector<double> riemann;  // R^l_{kij} at ((l*n+k)*n+i)*n+j
  Eigen::MatrixXd ricci;        // R_kj = R^l_{klj}
  double riem(int l, int k, int i, int j) const {
    return riemann[static_cast<size_t>(((l * n + k) * n + i) * n + j)];
  }
};

Curvature curvature(const MetricChart& chart, std::span<const double> x);
Eigen::MatrixXd ricci(const MetricChart& chart, std::span<const double> x);

CausalClass classify(const MetricChart& chart, std::span<const double> x,
                     std::span<const double> v);

// Lorentz norm of a future timelike vector/covector; throws NotTimelikeFuture.
double lorentz_norm_vector(const MetricChart& chart, std::span<const double> x,
                           std::span<const double> v);
double lorentz_norm_covector(const MetricChart& chart, std::span<const double> x,
                             std::span<const double> w);

// Metric-spec JSON: { "name", "dimension", "coordinates", "metric",
// "time_orientation", "domain" } with expression-string entries.
MetricChart chart_from_json_text(const std::string& text);
MetricChart chart_from_json_file(const std::string& path);
// Built-in name, or a path to a metric-spec file.
MetricChart resolve_chart(const std::string& name_or_path);

inline Eigen::VectorXd raise_index(const MetricEval& m, const Eigen::VectorXd& w) {
  return m.g_inv * w;
}
inline Eigen::VectorXd lower_index(const MetricEval& m, const Eigen::VectorXd& v) {
  return m.g * v;
}

}  // namespace lorlab
