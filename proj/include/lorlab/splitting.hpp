#pragma once
// Product-structure diagnostics for a complete maximizing timelike line:
// project seed points onto the zero level set of the forward Busemann
// function, assemble the unit normal and the induced Riemannian metric of
// the level set, realize the candidate isometry E(r, x) = exp_x(r grad b+),
// and measure how far the ambient geometry is from the product metric
// dr^2 - h (pullback deviation, product time-separation formula, parallel
// normal, vanishing second fundamental form).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lorlab/busemann.hpp"
#include "lorlab/metric.hpp"
#include "lorlab/pdalembert.hpp"

namespace lorlab {

// Max Frobenius norm (in the Riemannian flip of g along the unit gradient
// of u) of the finite-difference covariant Hessian of u over `samples`
// points of `region` (center plus uniform draws, stencil kept in-domain).
// Throws NotTimelikeFuture when du leaves the future cone at a sample.
double hessian_norm_field(const MetricChart& chart, const ScalarFieldSample& u,
                          const Box& region, double h, int samples = 9,
                          std::uint64_t seed = 0);

// Same, for the extrapolated Busemann limit of `field` (NotConverged
// propagates when the schedule has not settled).
double hessian_norm_field(BusemannField& field, const Box& region, double h,
                          int samples = 9, std::uint64_t seed = 0);

// Newton iteration along the raised gradient direction onto {b+ = 0};
// throws NewtonFail when |b+| does not reach `tol` within `max_iter`.
std::vector<double> project_to_level_set(BusemannField& field,
                                         std::span<const double> seed,
                                         double tol, double fd_h,
                                         int max_iter = 30);

// Discrete section of the Busemann zero level set: projected sample
// points, the unit normal N = (db+)# at each, a tangent basis T_a
// (coordinate axes projected off N, so tangent coefficients ride the
// spatial coordinates), and the induced Riemannian metric
// h_ab = -g(T_a, T_b).
struct SplitFrame {
  const MetricChart* chart = nullptr;
  BusemannField* field = nullptr;  // non-owning
  LineSpec line;
  double fd_h = 0.0;                         // step used for db+
  std::vector<std::vector<double>> points;   // on the level set
  std::vector<double> b_residual;            // b+ left after projection
  std::vector<Eigen::VectorXd> normal;       // raised db+, future unit
  std::vector<Eigen::MatrixXd> tangent;      // n x (n-1), columns T_a
  std::vector<Eigen::MatrixXd> induced_h;    // (n-1) x (n-1), pos. def.
  double max_normal_dev = 0.0;               // max |g(N,N) - 1|
  double min_induced_eig = 0.0;              // min eigenvalue of h over points
  int dropped_seeds = 0;                     // Newton failures skipped

  std::string to_json() const;
};

// Projects every seed and assembles the frame. Seeds whose Newton
// projection fails are dropped with a warning; throws NewtonFail when none
// survive, SingularMetric when an induced metric is not positive definite,
// and NotTimelikeFuture when db+ leaves the future cone.
SplitFrame build_level_set(BusemannField& field,
                           const std::vector<std::vector<double>>& seeds,
                           double tol = 1e-9, double fd_h = 1e-2);

// E(r, x_k) = exp_{x_k}(r N_k): the point at proper time r along the
// normal geodesic through level-set sample k. OutOfDomain propagates.
std::vector<double> splitting_map(const SplitFrame& frame, double r, int k);

// E at an arbitrary level-set point (normal recomputed there); used by the
// finite differences below.
std::vector<double> splitting_map_at(const SplitFrame& frame, double r,
                                     std::span<const double> x_on_level_set);

struct PullbackReport {
  int pairs = 0;
  double max_deviation = 0.0;  // |g(dE d, dE d') - (dr^2 - h)(d, d')|
  double tol = 1e-4;
  bool pass = false;
  std::string to_json() const;
};

// Compares g(dE(d), dE(d')) (finite differences of E through re-projected
// level-set curves) against the product metric dr^2 - h on `pair_samples`
// random tangent pairs per r in r_list, plus deterministic pure-r, pure-x,
// and mixed cross pairs.
PullbackReport pullback_metric_check(const SplitFrame& frame,
                                     std::span<const double> r_list,
                                     int pair_samples, double tol = 1e-4,
                                     std::uint64_t seed = 0,
                                     double fd_eps = 1e-2);

// Intrinsic level-set distance between samples i and j: Dijkstra over the
// k-nearest-neighbor chord graph of the frame points, then the winning
// path is refined by projecting edge midpoints back onto the level set.
double level_set_distance(const SplitFrame& frame, int i, int j,
                          int k_neighbors = 6, int refine_levels = 2);

struct ProductTimesepReport {
  double lhs = 0.0;   // ell(E(s, i), E(t, j))
  double rhs = 0.0;   // sqrt((t-s)^2 - d_h^2), -inf when t - s < d_h
  double d_h = 0.0;
  bool both_infinite = false;
  double deviation = 0.0;     // |lhs - rhs| on the finite branch
  bool inequality_ok = false; // lhs >= rhs - tol
  bool equality_ok = false;   // deviation <= tol or both infinite
  double tol = 1e-3;
  bool pass = false;
  std::string to_json() const;
};

// Checks the product time-separation formula between E(s, point i) and
// E(t, point j).
ProductTimesepReport product_timesep_check(const SplitFrame& frame, double s,
                                           int i, double t, int j,
                                           double tol = 1e-3);

// Max norm over r_list of the finite-difference covariant derivative of
// the normal field along r -> E(r, x_k) (zero when N is parallel).
double normal_parallel_deviation(const SplitFrame& frame, int k,
                                 std::span<const double> r_list,
                                 double eps = 1e-3);

// Max |II_ab| = |g(nabla_{T_a} N, T_b)| at level-set sample k (zero when
// the leaf is totally geodesic).
double second_fundamental_form_norm(const SplitFrame& frame, int k,
                                    double eps = 1e-3);

}  // namespace lorlab
