#include "lorlab/bochner.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

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

// Pointwise data derived from u by finite differences of step h: the lowered
// gradient, s = |du|^2/2, and the raised gradient, with the on-cone check.
struct GradientData {
  Eigen::VectorXd du;
  Eigen::VectorXd du_up;
  double s = 0.0;
  MetricEval m;
};

GradientData gradient_data(const MetricChart& chart, const ScalarFieldSample& u,
                           std::span<const double> x, double h) {
  GradientData out;
  out.m = eval_metric(chart, x);
  std::vector<double> g = u.gradient(x, h);
  out.du = Eigen::Map<const Eigen::VectorXd>(g.data(), chart.dim());
  out.du_up = out.m.g_inv * out.du;
  double n2 = out.du.dot(out.du_up);
  Eigen::VectorXd tau = chart.time_orientation(x);
  if (!(n2 > 0.0) || out.du_up.dot(out.m.g * tau) <= 0.0)
    throw NotTimelikeFuture("du at " + point_str(x) +
                            " is not future timelike (|du|^2 = " + std::to_string(n2) + ")");
  out.s = 0.5 * n2;
  return out;
}

// DH components H^i = f'(s) du^i at a point.
Eigen::VectorXd dh_field(const MetricChart& chart, const ScalarFieldSample& u,
                         const HamiltonianProfile& prof, std::span<const double> x,
                         double h) {
  GradientData gd = gradient_data(chart, u, x, h);
  return prof.f1(gd.s) * gd.du_up;
}

// D2H matrix A^{ij} = f''(s) du^i du^j + f'(s) g^{ij} at a point.
Eigen::MatrixXd d2h_field(const HamiltonianProfile& prof, const GradientData& gd) {
  return prof.f2(gd.s) * (gd.du_up * gd.du_up.transpose()) + prof.f1(gd.s) * gd.m.g_inv;
}

// Covariant Hessian u_{;ij} = d_i d_j u - Gamma^k_{ij} d_k u at a point.
Eigen::MatrixXd covariant_hessian(const MetricChart& chart, const ScalarFieldSample& u,
                                  std::span<const double> x, double h,
                                  const Eigen::VectorXd& du) {
  Eigen::MatrixXd hess = u.hessian(x, h);
  std::vector<Eigen::MatrixXd> Gam = christoffel(chart, x);
  for (int k = 0; k < chart.dim(); ++k) hess -= du(k) * Gam[k];
  return hess;
}

}  // namespace

HamiltonianProfile HamiltonianProfile::power(double p) {
  HamiltonianProfile prof;
  if (p == 0.0) {
    prof.f = [](double s) { return -0.5 * std::log(2.0 * s); };
  } else {
    prof.f = [p](double s) { return -(1.0 / p) * std::pow(2.0 * s, 0.5 * p); };
  }
  prof.f1 = [p](double s) { return -std::pow(2.0 * s, 0.5 * (p - 2.0)); };
  prof.f2 = [p](double s) { return (2.0 - p) * std::pow(2.0 * s, 0.5 * (p - 4.0)); };
  prof.f3 = [p](double s) {
    return -(2.0 - p) * (4.0 - p) * std::pow(2.0 * s, 0.5 * (p - 6.0));
  };
  return prof;
}

double bochner_lhs(const MetricChart& chart, const ScalarFieldSample& u,
                   const HamiltonianProfile& profile, std::span<const double> x,
                   double h) {
  const int n = chart.dim();

  // Scalar field h(y) = f(s(y)).
  auto h_scalar = [&](std::span<const double> y) {
    return profile.f(gradient_data(chart, u, y, h).s);
  };
  // Flux field of the first term: V^i(y) = A^{ij}(y) d_j h(y), already
  // densitized by sqrt|g| for the conservative divergence.
  auto v_dens = [&](std::span<const double> y) {
    GradientData gd = gradient_data(chart, u, y, h);
    Eigen::MatrixXd A = d2h_field(profile, gd);
    Eigen::VectorXd dh_s(n);
    std::vector<double> yp(y.begin(), y.end());
    for (int j = 0; j < n; ++j) {
      yp[j] = y[j] + h;
      double fp = h_scalar(yp);
      yp[j] = y[j] - h;
      double fm = h_scalar(yp);
      yp[j] = y[j];
      dh_s(j) = (fp - fm) / (2.0 * h);
    }
    return Eigen::VectorXd(gd.m.sqrt_abs_det * (A * dh_s));
  };
  // Densitized DH field for the second term.
  auto w_dens = [&](std::span<const double> y) {
    GradientData gd = gradient_data(chart, u, y, h);
    return Eigen::VectorXd(gd.m.sqrt_abs_det * profile.f1(gd.s) * gd.du_up);
  };
  // div W as a scalar field.
  auto div_w = [&](std::span<const double> y) {
    MetricEval m = eval_metric(chart, y);
    double acc = 0.0;
    std::vector<double> yp(y.begin(), y.end());
    for (int i = 0; i < n; ++i) {
      yp[i] = y[i] + h;
      double fp = w_dens(yp)(i);
      yp[i] = y[i] - h;
      double fm = w_dens(yp)(i);
      yp[i] = y[i];
      acc += (fp - fm) / (2.0 * h);
    }
    return acc / m.sqrt_abs_det;
  };

  MetricEval m = eval_metric(chart, x);
  std::vector<double> xp(x.begin(), x.end());

  double div_v = 0.0;
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    double fp = v_dens(xp)(i);
    xp[i] = x[i] - h;
    double fm = v_dens(xp)(i);
    xp[i] = x[i];
    div_v += (fp - fm) / (2.0 * h);
  }
  div_v /= m.sqrt_abs_det;

  Eigen::VectorXd W = dh_field(chart, u, profile, x, h);
  double term2 = 0.0;
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    double sp = div_w(xp);
    xp[i] = x[i] - h;
    double sm = div_w(xp);
    xp[i] = x[i];
    term2 += W(i) * (sp - sm) / (2.0 * h);
  }

  return div_v - term2;
}

std::pair<double, double> bochner_rhs(const MetricChart& chart,
                                      const ScalarFieldSample& u,
                                      const HamiltonianProfile& profile,
                                      std::span<const double> x, double h) {
  GradientData gd = gradient_data(chart, u, x, h);
  Eigen::MatrixXd A = d2h_field(profile, gd);
  Eigen::MatrixXd B = covariant_hessian(chart, u, x, h, gd.du);
  Eigen::MatrixXd AB = A * B;
  double trace_term = (AB * AB).trace();

  Eigen::VectorXd W = profile.f1(gd.s) * gd.du_up;
  Eigen::MatrixXd ric = ricci(chart, x);
  double ricci_term = W.dot(ric * W);
  return {trace_term, ricci_term};
}

BochnerReport bochner_report(const MetricChart& chart, const ScalarFieldSample& u,
                             const HamiltonianProfile& profile,
                             std::span<const double> x, double h) {
  BochnerReport rep;
  rep.x.assign(x.begin(), x.end());
  rep.h = h;
  rep.lhs = bochner_lhs(chart, u, profile, x, h);
  auto [tr, rc] = bochner_rhs(chart, u, profile, x, h);
  rep.rhs_trace = tr;
  rep.rhs_ricci = rc;
  rep.residual = rep.lhs - (tr + rc);
  return rep;
}

IdentityConvergence verify_identity(const MetricChart& chart,
                                    const ScalarFieldSample& u,
                                    const HamiltonianProfile& profile,
                                    const Box& region,
                                    std::span<const double> h_schedule,
                                    int samples, std::uint64_t seed) {
  if (h_schedule.size() < 2) throw ConfigError("h schedule needs at least two levels");
  double h_max = *std::max_element(h_schedule.begin(), h_schedule.end());
  const int n = static_cast<int>(region.size());

  // Sample points with a 3.5 h_max margin so the deepest stencil stays inside.
  std::vector<std::vector<double>> pts;
  {
    std::vector<double> center(n);
    for (int i = 0; i < n; ++i) center[i] = 0.5 * (region[i][0] + region[i][1]);
    pts.push_back(center);
    std::mt19937_64 rng(seed);
    for (int k = 1; k < samples; ++k) {
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) {
        double lo = region[i][0] + 3.5 * h_max, hi = region[i][1] - 3.5 * h_max;
        if (!(lo < hi)) throw ConfigError("region too small for the stencil margin");
        x[i] = lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      }
      pts.push_back(std::move(x));
    }
  }

  IdentityConvergence out;
  out.h_schedule.assign(h_schedule.begin(), h_schedule.end());
  out.max_residual.assign(h_schedule.size(), 0.0);
  for (size_t hi = 0; hi < h_schedule.size(); ++hi) {
    for (const auto& x : pts) {
      BochnerReport rep = bochner_report(chart, u, profile, x, h_schedule[hi]);
      out.max_residual[hi] = std::max(out.max_residual[hi], std::abs(rep.residual));
      out.reports.push_back(std::move(rep));
    }
  }

  out.trivially_small = std::all_of(out.max_residual.begin(), out.max_residual.end(),
                                    [](double r) { return r <= 1e-10; });
  // Log-log least-squares slope of max residual against h.
  double s00 = 0, s01 = 0, s11 = 0, b0 = 0, b1 = 0;
  for (size_t i = 0; i < out.max_residual.size(); ++i) {
    double lx = std::log(out.h_schedule[i]);
    double ly = std::log(std::max(out.max_residual[i], 1e-16));
    s00 += 1.0;
    s01 += lx;
    s11 += lx * lx;
    b0 += ly;
    b1 += lx * ly;
  }
  double det = s00 * s11 - s01 * s01;
  out.slope = det != 0.0 ? (s00 * b1 - s01 * b0) / det : 0.0;
  out.pass = out.trivially_small || out.slope >= 1.7;
  return out;
}

std::string identity_csv(const IdentityConvergence& conv) {
  std::ostringstream os;
  os.precision(17);
  size_t dim = conv.reports.empty() ? 0 : conv.reports.front().x.size();
  for (size_t i = 0; i < dim; ++i) os << "x" << i << ",";
  os << "h,lhs,trace,ricci,residual,slope\n";
  for (const auto& r : conv.reports) {
    for (double xi : r.x) os << xi << ",";
    os << r.h << "," << r.lhs << "," << r.rhs_trace << "," << r.rhs_ricci << ","
       << r.residual << "," << conv.slope << "\n";
  }
  return os.str();
}

PositivitySplit positivity_split(const MetricChart& chart, const ScalarFieldSample& u,
                                 const HamiltonianProfile& profile,
                                 std::span<const double> x, double h, double tol) {
  GradientData gd = gradient_data(chart, u, x, h);
  Eigen::MatrixXd A = d2h_field(profile, gd);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw SquareRootFailure("D2H has a nonpositive eigenvalue (" +
                            std::to_string(es.eigenvalues().minCoeff()) +
                            "); the square root requires the p < 1 regime");
  Eigen::MatrixXd sqrtA = es.eigenvectors() *
                          es.eigenvalues().cwiseSqrt().asDiagonal() *
                          es.eigenvectors().transpose();

  Eigen::MatrixXd B = covariant_hessian(chart, u, x, h, gd.du);
  Eigen::MatrixXd C = sqrtA * B * sqrtA;
  PositivitySplit out;
  out.value = C.squaredNorm();  // = Tr[sqrt(A) B A B sqrt(A)]
  out.hessian_norm = B.norm();
  out.tol = tol;
  out.nonnegative = out.value >= -tol;
  out.zero_iff_flat = (out.value <= tol) == (out.hessian_norm <= std::sqrt(tol));
  out.pass = out.nonnegative && out.zero_iff_flat;
  return out;
}

}  // namespace lorlab
