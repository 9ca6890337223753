#pragma once
// Busemann functions of a complete timelike line: finite-radius values
// b+_r(x) = ell(g0, g(r)) - ell(x, g(r)) and the mirrored backward values,
// their extrapolated r -> oo limits, and the estimator toolbox used to
// probe ordering, steepness, gradients, semiconcavity, and Lipschitz
// regularity of those functions.

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "lorlab/geodesic.hpp"
#include "lorlab/metric.hpp"
#include "lorlab/timesep.hpp"

namespace lorlab {

// Axis-aligned sampling region, one [lo, hi] per coordinate.
using Box = std::vector<std::array<double, 2>>;

// Scalar field sampled pointwise; may return +/-inf (excluded from
// difference quotients by the estimators below).
using ScalarField = std::function<double(std::span<const double>)>;

// A realized timelike line through base = gamma(0) with unit future
// timelike tangent, integrated over [-r_max, r_max].
struct LineSpec {
  const MetricChart* chart = nullptr;
  std::vector<double> base;
  std::vector<double> tangent;
  double r_max = 0.0;
  Geodesic forward;   // gamma restricted to [0, r_max]
  Geodesic backward;  // s -> gamma(-s) on [0, r_max]

  std::vector<double> point(double r) const;
  std::vector<double> velocity(double r) const;
};

// Validates |tangent|_g = 1 (within 1e-9) and that the realized line stays
// inside the chart box over [-r_max, r_max].
LineSpec make_line(const MetricChart& chart, std::span<const double> base,
                   std::span<const double> tangent, double r_max);

// Same geometric line re-parameterized so the new zero point is
// gamma(delta); the tangent is the line's velocity there.
LineSpec rebase_line(const LineSpec& line, double delta);

// Default finite-radius schedule {5, 10, 20, 40} scaled down uniformly when
// the chart box cannot accommodate radius 40 from the base point.
std::vector<double> default_r_schedule(const MetricChart& chart,
                                       std::span<const double> base);

enum class BusemannDirection { forward, backward };

struct ConvergenceReport {
  std::vector<double> radii;
  std::vector<double> per_r;   // finite-radius values along the schedule
  std::vector<double> diffs;   // successive differences
  bool monotone = false;       // per-r values monotone in the proper sense
  bool converged = false;      // last difference under the tolerance
  double limit = 0.0;
};

struct BusemannValues {
  std::vector<double> per_r;
  double limit = 0.0;
  bool finite = true;  // false: +inf (forward) / -inf (backward)
};

// Finite-radius Busemann values of one line in one direction, memoized per
// evaluation point. The memo table tolerates concurrent use: inserts are
// idempotent and guarded, recomputation is harmless.
class BusemannField {
 public:
  BusemannField(LineSpec line, BusemannDirection direction,
                std::vector<double> r_schedule);

  const LineSpec& line() const { return line_; }
  BusemannDirection direction() const { return direction_; }
  const std::vector<double>& r_schedule() const { return r_schedule_; }

  // Finite-radius value at schedule parameter r > 0: b+_r for a forward
  // field, b-_{-r} for a backward field. +/-inf when x is causally
  // disconnected from the witness point on the line.
  double value_r(std::span<const double> x, double r);

  // All schedule values plus the extrapolated limit, memoized.
  const BusemannValues& values_at(std::span<const double> x);

 private:
  double raw_value_r(std::span<const double> x, double r,
                     std::vector<double>& v_warm);
  double line_separation(double r);  // ell between gamma(0) and gamma(+/-r)

  LineSpec line_;
  BusemannDirection direction_;
  std::vector<double> r_schedule_;
  std::map<std::vector<double>, BusemannValues> memo_;
  std::map<double, double> line_ell_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

// b+_r(x) = ell(gamma(0), gamma(r)) - ell(x, gamma(r)); +inf when
// ell(x, gamma(r)) = -inf. Requires a forward field and r > 0.
double b_plus_r(BusemannField& field, std::span<const double> x, double r);

// b-_r(x) = ell(gamma(r), x) - ell(gamma(r), gamma(0)) for r < 0; -inf when
// ell(gamma(r), x) = -inf. Requires a backward field.
double b_minus_r(BusemannField& field, std::span<const double> x, double r);

// Extrapolated limit: least-squares fit of v = limit + c/r on the last
// three finite schedule values. Throws NotConverged when the last two
// successive differences both exceed diff_tol.
ConvergenceReport busemann_limit(BusemannField& field, std::span<const double> x,
                                 double diff_tol = 1e-2);

struct OrderingReport {
  double b_plus_r = 0.0;
  double b_plus = 0.0;
  double b_minus = 0.0;
  double b_minus_mr = 0.0;
  double tol = 1e-6;
  bool chain_ok = false;  // b+_r >= b+ >= b- >= b-_{-r} within tol
  bool all_equal = false; // max spread <= tol (expected on the line)
};

// Evaluates the four-term ordering chain at x using radius r > 0.
OrderingReport check_ordering(BusemannField& forward_field,
                              BusemannField& backward_field,
                              std::span<const double> x, double r,
                              double tol = 1e-6);

struct SteepnessReport {
  std::vector<double> radii;
  std::vector<double> lhs;  // b_r(y) - b_r(x) per schedule radius
  double ell_xy = 0.0;
  double tol = 1e-6;
  bool pass = false;  // lhs >= ell_xy - tol at every radius
};

// Checks b_r(y) - b_r(x) >= ell(x, y) across the schedule for a causally
// related pair x <= y.
SteepnessReport check_steepness(BusemannField& field, std::span<const double> x,
                                std::span<const double> y);

// Central-difference gradient (covector components) of the extrapolated
// limit function at x with stencil width h per coordinate.
std::vector<double> gradient_fd(BusemannField& field, std::span<const double> x,
                                double h);

// Largest symmetric second difference quotient
//   [f(x + w) + f(x - w) - 2 f(x)] / |w|^2
// over sampled points and directions (axes plus random unit directions),
// Richardson-refined over scales {scale, scale/2, scale/4}. Infinite field
// values are skipped. An estimator, not a certificate.
double semiconcavity_estimate(const ScalarField& f, const Box& region,
                              double scale, int samples, uint64_t seed = 0,
                              int random_dirs = 20);

// Largest first difference quotient |f(y) - f(x)| / |y - x| (euclidean
// auxiliary metric) over sampled pairs at scales up to `scale`.
double lipschitz_estimate(const ScalarField& f, const Box& region, double scale,
                          int samples, uint64_t seed = 0);

struct UpperSupportReport {
  double max_violation = 0.0;   // max of b+_r(x') - u_r(x') over samples
  double max_equality_dev = 0.0;  // max |u_r - b+_r| along the maximizer
  double tol = 1e-6;
  bool inequality_ok = false;
  bool equality_ok = false;
};

// Builds the cone-based upper support function
//   u_r(x') = b+_r(x) + ell(x, sigma_r(s)) - ell(x', sigma_r(s))
// from the maximizer sigma_r joining x to gamma(r), and checks u_r >= b+_r
// near x with equality along sigma_r([0, s]). s is a proper-time offset
// with 0 < s <= ell(x, gamma(r)).
UpperSupportReport upper_support_check(BusemannField& field,
                                       std::span<const double> x, double r,
                                       double s, int samples = 50,
                                       double radius = 0.1, uint64_t seed = 0);

}  // namespace lorlab
