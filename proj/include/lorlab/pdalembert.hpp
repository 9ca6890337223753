#pragma once
// Degenerate-elliptic machinery for the p-d'Alembertian on Lorentzian charts:
// the defining Hamiltonian and its derivatives, nondivergence evaluation on
// sampled scalar fields, weak (integrated-by-parts) pairings against bump test
// functions, frozen-coefficient extraction along the Busemann interpolation,
// and a discrete maximum-principle checker for the resulting operators.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lorlab/busemann.hpp"
#include "lorlab/metric.hpp"

namespace lorlab {

// Exponent p of the operator. The degenerate-elliptic regime is p < 1, p != 0;
// p = 2 (the wave operator) is admitted only as an indefinite contrast case.
struct PExponent {
  double value = 0.5;
  bool contrast = false;  // true only for the p = 2 comparison runs

  static PExponent elliptic(double p);  // requires p < 1 and p != 0
  static PExponent contrast_case(double p);
  void validate() const;
};

// A scalar field known through point evaluation, with finite-difference
// derivative access at a caller-chosen stencil size.
struct ScalarFieldSample {
  enum class Provenance { analytic, busemann_limit, grid };

  ScalarField eval;
  Provenance provenance = Provenance::analytic;

  double value(std::span<const double> x) const { return eval(x); }
  // Central differences, O(h^2).
  std::vector<double> gradient(std::span<const double> x, double h) const;
  // 9-point second differences, symmetric by construction, O(h^2).
  Eigen::MatrixXd hessian(std::span<const double> x, double h) const;
};

// Smooth compactly supported nonnegative test function
//   phi(x) = amplitude * (1 - (d/radius)^2)^3 for d < radius, else 0,
// with d the coordinate distance to the center. C^2 with Lipschitz gradient.
struct BumpTestFunction {
  std::vector<double> center;
  double radius = 1.0;
  double amplitude = 1.0;

  double value(std::span<const double> x) const;
  std::vector<double> gradient(std::span<const double> x) const;
  Box support_box() const;  // [center - radius, center + radius] per axis
};

// Defining Hamiltonian on covectors:
//   H(x, v) = -(1/p) |v|^p   (p != 0),   -log |v|   (p = 0)
// for v future timelike with |v| = sqrt(g^{ij} v_i v_j); +infinity otherwise.
// Never throws on causal type: the extended value encodes it.
double hamiltonian(const MetricChart& chart, std::span<const double> x,
                   std::span<const double> v, double p);

// Covector gradient H^i = dH/dv_i = -|v|^{p-2} v^i (contravariant components).
// Throws NotTimelikeFuture off the future cone.
Eigen::VectorXd dh(const MetricChart& chart, std::span<const double> x,
                   std::span<const double> v, double p);

// Covector Hessian H^{ij} = d2H/dv_i dv_j
//   = |v|^{p-2} [ (2-p) vhat^i vhat^j - g^{ij} ],   vhat = v / |v| raised.
// Positive definite iff p < 1; indefinite at p = 2.
Eigen::MatrixXd d2h(const MetricChart& chart, std::span<const double> x,
                    std::span<const double> v, double p);

// Nondivergence-form p-d'Alembertian at x, from FD derivatives of u:
//   |du|^{p-2} [ (2-p) Hess u(duhat, duhat) - g^{ij} u_{;ij} ]
// with the covariant Hessian u_{;ij} = d_i d_j u - Gamma^k_{ij} d_k u. Equals
// -div(|du|^{p-2} grad u). Requires du future timelike at x.
double box_p_nondiv(const MetricChart& chart, const ScalarFieldSample& u,
                    std::span<const double> x, double p, double h);

// Weak divergence-form pairing
//   integral of g(dphi, |du|^{p-2} du) dvol_g
// by a tensor-product Gauss-Legendre rule of `quad_order` points per axis over
// the support box of phi. Throws QuadratureDomainClip when the support box
// exits the chart domain. `fd_h` is the stencil for du (default 1e-4 of the
// support width).
double weak_div_pairing(const MetricChart& chart, const ScalarFieldSample& u,
                        const BumpTestFunction& phi, double p,
                        int quad_order = 8, double fd_h = 0.0);

// Weak comparison functional for the time separation l(x) = ell(x, gamma(r))
// to a point on the field's line:
//   integral of [ (n-1) phi / l + g(dphi, |dl|^{p-2} dl) ] dvol_g  >=  0
// under nonnegative timelike Ricci. Requires supp phi inside I^-(gamma(r)).
// `flip_zeroth` negates the (n-1) phi / l term: the sign-error control that a
// correct implementation must fail.
double weak_comparison_functional(const MetricChart& chart, BusemannField& field,
                                  const BumpTestFunction& phi, double r, double p,
                                  int quad_order = 8, bool flip_zeroth = false);

// Rectangular lattice over a chart sub-box: dims[k] >= 2 nodes per axis,
// row-major with the last axis fastest.
struct RectGrid {
  Box box;
  std::vector<int> dims;

  int axes() const { return static_cast<int>(dims.size()); }
  int node_count() const;
  std::vector<double> spacing() const;
  std::vector<int> unflatten(int k) const;
  int flatten(std::span<const int> idx) const;
  std::vector<double> node(int k) const;
  bool is_boundary(int k) const;
};

// Frozen (linearized) coefficients along the Busemann interpolation
//   b_t = b_minus + t (b_plus - b_minus),
//   a^{ij}(x) = sqrt|g| * integral_0^1 |db_t|^{p-2}
//               [ (2-p) db_t^i db_t^j / |db_t|^2 - g^{ij} ] dt
// with a Gauss-Legendre rule of `t_quadrature` points in t. Symmetric a per
// node with true nodal eigenvalue bounds. Throws NotTimelikeFuture naming the
// node index when db_t leaves the future cone.
struct EllipticCoefficients {
  const MetricChart* chart = nullptr;
  RectGrid grid;
  std::vector<Eigen::MatrixXd> a;    // per node, symmetric
  std::vector<double> lambda_min_node;
  std::vector<double> lambda_max_node;
  double lambda_min = 0.0;  // min over nodes
  double lambda_max = 0.0;  // max over nodes

  std::string to_json() const;  // node coords, a^{ij}, eigenvalue bounds
};

EllipticCoefficients frozen_coefficients(const MetricChart& chart,
                                         const ScalarFieldSample& b_plus,
                                         const ScalarFieldSample& b_minus,
                                         const RectGrid& grid, double p,
                                         int t_quadrature = 16, double fd_h = 0.0);

// Discrete maximum-principle check for L = -d_j(a^{ij} d_i u), assembled by
// conservative finite volumes with harmonic averaging of face coefficients.
// Verifies: M-matrix sign pattern, the supersolution pairing (L u)_k >= -tol
// on interior nodes, and strong-minimum propagation (the discrete harmonic
// extension v of u's boundary data attains its minimum on the boundary; a
// nonnegative near-harmonic u with an interior zero stays <= tol on that
// node's connected component). Throws NotElliptic when lambda_min <= 0.
struct MaxPrincipleReport {
  bool m_matrix = false;
  double supersolution_min = 0.0;   // min over interior nodes of (L u)_k
  double harmonic_deviation = 0.0;  // max |u - v| over the grid
  double interior_min = 0.0;
  double boundary_min = 0.0;
  bool min_propagation_ok = false;  // interior_min >= boundary_min - tol for v
  bool zero_propagation_ok = true;  // interior zero of nonneg near-harmonic u
                                    // forces u <= tol on its component
  double tol = 0.0;
  bool pass = false;

  std::string to_json() const;
};

MaxPrincipleReport max_principle_check(const EllipticCoefficients& coeffs,
                                       const std::vector<double>& u_grid,
                                       const std::vector<std::uint8_t>& boundary_mask,
                                       double tol = 1e-8);

}  // namespace lorlab
