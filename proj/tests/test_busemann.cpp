#include "lorlab/busemann.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lorlab/errors.hpp"
#include "oracles.hpp"

using namespace lorlab;

namespace {

// closed-form finite-radius value on flat 2d charts for the vertical line
double flat_bpr(double r, double t, double x) {
  const double q = (r - t) * (r - t) - x * x;
  if (q <= 0 || r <= t) return std::numeric_limits<double>::infinity();
  return r - std::sqrt(q);
}

BusemannField make_flat_field(const MetricChart& chart, BusemannDirection dir) {
  std::vector<double> base(static_cast<size_t>(chart.dim()), 0.0);
  std::vector<double> tangent(static_cast<size_t>(chart.dim()), 0.0);
  tangent[0] = 1.0;
  auto schedule = default_r_schedule(chart, base);
  LineSpec line = make_line(chart, base, tangent, schedule.back());
  return BusemannField(std::move(line), dir, schedule);
}

}  // namespace

TEST_CASE("line construction and sampling") {
  MetricChart mink = MetricChart::builtin("minkowski2d");
  std::vector<double> base{0.0, 0.0}, tangent{1.0, 0.0};
  LineSpec line = make_line(mink, base, tangent, 40.0);
  auto p = line.point(3.0);
  CHECK(p[0] == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-10));
  auto pm = line.point(-7.5);
  CHECK(pm[0] == doctest::Approx(-7.5).epsilon(1e-10));
  auto v = line.velocity(-7.5);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-9));

  std::vector<double> bad{1.1, 0.0};
  CHECK_THROWS_AS(make_line(mink, base, bad, 40.0), ConfigError);
  CHECK_THROWS_AS(make_line(mink, base, tangent, 200.0), ConfigError);

  // boosted line in flat space stays unit and straight
  const double u = 0.3;
  std::vector<double> boosted{std::cosh(u), std::sinh(u)};
  LineSpec bl = make_line(mink, base, boosted, 20.0);
  auto bp = bl.point(5.0);
  CHECK(bp[0] == doctest::Approx(5.0 * std::cosh(u)).epsilon(1e-9));
  CHECK(bp[1] == doctest::Approx(5.0 * std::sinh(u)).epsilon(1e-9));
}

TEST_CASE("finite-radius values match the flat closed form") {
  MetricChart mink = MetricChart::builtin("minkowski2d");
  BusemannField fwd = make_flat_field(mink, BusemannDirection::forward);
  BusemannField bwd = make_flat_field(mink, BusemannDirection::backward);

  std::vector<double> x{0.0, 0.5};
  CHECK(b_plus_r(fwd, x, 10.0) ==
        doctest::Approx(oracle::kTenMinusSqrt9975).epsilon(1e-6));
  CHECK(b_minus_r(bwd, x, -10.0) ==
        doctest::Approx(-oracle::kTenMinusSqrt9975).epsilon(1e-6));

  std::vector<double> on_line{3.0, 0.0};
  CHECK(b_plus_r(fwd, on_line, 10.0) == doctest::Approx(3.0).epsilon(1e-8));
  std::vector<double> past{-2.0, 0.0};
  CHECK(b_minus_r(bwd, past, -10.0) == doctest::Approx(-2.0).epsilon(1e-8));

  std::vector<double> far{0.0, 20.0};
  CHECK(std::isinf(b_plus_r(fwd, far, 10.0)));
  CHECK(b_plus_r(fwd, far, 10.0) > 0);
  CHECK(std::isinf(b_minus_r(bwd, far, -10.0)));
  CHECK(b_minus_r(bwd, far, -10.0) < 0);

  CHECK_THROWS_AS(b_plus_r(bwd, x, 10.0), ConfigError);
  CHECK_THROWS_AS(b_minus_r(bwd, x, 10.0), ConfigError);

  // general box points against the closed form
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double t = ut(rng), xs = 0.5 * ut(rng);
    std::vector<double> p{t, xs};
    for (double r : fwd.r_schedule())
      CHECK(std::abs(b_plus_r(fwd, p, r) - flat_bpr(r, t, xs)) <= 1e-6);
  }
}

TEST_CASE("limit extrapolation recovers t on flat charts") {
  for (const char* name : {"minkowski2d", "product2d"}) {
    MetricChart chart = MetricChart::builtin(name);
    BusemannField fwd = make_flat_field(chart, BusemannDirection::forward);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 8; ++k) {
      std::vector<double> p{u(rng), 0.5 * u(rng)};
      ConvergenceReport rep = busemann_limit(fwd, p);
      CHECK(rep.monotone);
      CHECK(rep.converged);
      CHECK(std::abs(rep.limit - p[0]) <= 1e-4);
    }
    // on the line the finite-radius values already sit at the limit
    std::vector<double> q{1.0, 0.0};
    ConvergenceReport rep = busemann_limit(fwd, q);
    CHECK(rep.limit == doctest::Approx(1.0).epsilon(1e-8));
    for (double v : rep.per_r) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("ordering chain and on-line equality") {
  MetricChart mink = MetricChart::builtin("minkowski2d");
  BusemannField fwd = make_flat_field(mink, BusemannDirection::forward);
  BusemannField bwd = make_flat_field(mink, BusemannDirection::backward);

  std::vector<double> x{0.0, 0.3};
  OrderingReport rep = check_ordering(fwd, bwd, x, 10.0);
  CHECK(rep.chain_ok);
  CHECK(rep.b_plus_r > rep.b_plus + 1e-4);   // strict outer slack
  CHECK(rep.b_minus > rep.b_minus_mr + 1e-4);

  std::vector<double> on_line{1.0, 0.0};
  OrderingReport rep2 = check_ordering(fwd, bwd, on_line, 10.0);
  CHECK(rep2.chain_ok);
  CHECK(rep2.all_equal);
  CHECK(rep2.b_plus == doctest::Approx(1.0).epsilon(1e-6));

  MetricChart prod = MetricChart::builtin("product2d");
  BusemannField pf = make_flat_field(prod, BusemannDirection::forward);
  BusemannField pb = make_flat_field(prod, BusemannDirection::backward);
  // sampled inside the diamond near the line: the middle inequality is an
  // exact equality on flat charts, so the extrapolation bias must stay
  // below the chain tolerance
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-0.4, 0.4);
  for (int k = 0; k < 5; ++k) {
    std::vector<double> p{u(rng), u(rng)};
    CHECK(check_ordering(pf, pb, p, 10.0).chain_ok);
  }
}

TEST_CASE("steepness along causal pairs") {
  MetricChart mink = MetricChart::builtin("minkowski2d");
  BusemannField fwd = make_flat_field(mink, BusemannDirection::forward);

  std::vector<double> o{0.0, 0.0}, y1{1.0, 0.0}, y2{2.0, 1.0};
  SteepnessReport r1 = check_steepness(fwd, o, y1);
  CHECK(r1.pass);
  CHECK(r1.ell_xy == doctest::Approx(1.0).epsilon(1e-8));
  for (double lhs : r1.lhs) CHECK(lhs == doctest::Approx(1.0).epsilon(1e-7));

  SteepnessReport r2 = check_steepness(fwd, o, y2);
  CHECK(r2.pass);
  CHECK(r2.ell_xy == doctest::Approx(oracle::kSqrt3).epsilon(1e-8));
  for (double lhs : r2.lhs) CHECK(lhs >= oracle::kSqrt3 - 1e-6);

  SteepnessReport r3 = check_steepness(fwd, o, o);
  CHECK(r3.pass);
  CHECK(r3.ell_xy == doctest::Approx(0.0));
}

TEST_CASE("limit gradient is the unit future covector") {
  for (const char* name : {"minkowski2d", "product2d"}) {
    MetricChart chart = MetricChart::builtin(name);
    BusemannField fwd = make_flat_field(chart, BusemannDirection::forward);
    BusemannField bwd = make_flat_field(chart, BusemannDirection::backward);
    std::vector<double> x{0.2, 0.1};
    for (BusemannField* f : {&fwd, &bwd}) {
      auto db = gradient_fd(*f, x, 1e-2);
      CHECK(db[0] == doctest::Approx(1.0).epsilon(1e-3));
      CHECK(std::abs(db[1]) <= 1e-3);
      CHECK(lorentz_norm_covector(chart, x, db) == doctest::Approx(1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("semiconcavity estimator on model fields") {
  Box region{{-1.0, 1.0}, {-0.5, 0.5}};
  ScalarField linear = [](std::span<const double> p) { return p[0]; };
  CHECK(std::abs(semiconcavity_estimate(linear, region, 1e-2, 10, 3)) <= 1e-9);

  ScalarField quad = [](std::span<const double> p) {
    return -(p[0] * p[0] + p[1] * p[1]);
  };
  CHECK(semiconcavity_estimate(quad, region, 1e-2, 10, 3) ==
        doctest::Approx(-2.0).epsilon(1e-8));

  // finite-radius family near the line: bounded and nonincreasing in r
  MetricChart mink = MetricChart::builtin("minkowski2d");
  BusemannField fwd = make_flat_field(mink, BusemannDirection::forward);
  Box near_line{{-0.5, 0.5}, {-0.3, 0.3}};
  std::vector<double> c_hats;
  for (double r : {12.375, 24.75, 49.5}) {
    ScalarField f = [&](std::span<const double> p) { return fwd.value_r(p, r); };
    c_hats.push_back(semiconcavity_estimate(f, near_line, 0.02, 4, 5, 4));
  }
  for (double c : c_hats) {
    CHECK(c > 0.0);       // flat-chart finite-radius values are convex in x
    CHECK(c < 0.3);       // uniformly bounded near the line
  }
  CHECK(c_hats[0] >= c_hats[1] - 1e-6);
  CHECK(c_hats[1] >= c_hats[2] - 1e-6);
}

TEST_CASE("lipschitz estimator on model fields") {
  Box region{{-1.0, 1.0}, {-0.5, 0.5}};
  ScalarField linear = [](std::span<const double> p) { return p[0]; };
  const double l_lin = lipschitz_estimate(linear, region, 0.05, 100, 9);
  CHECK(l_lin == doctest::Approx(1.0).epsilon(1e-9));

  MetricChart mink = MetricChart::builtin("minkowski2d");
  BusemannField fwd = make_flat_field(mink, BusemannDirection::forward);
  ScalarField b10 = [&](std::span<const double> p) { return fwd.value_r(p, 10.0); };
  const double l_b = lipschitz_estimate(b10, region, 0.05, 30, 9);
  CHECK(l_b <= 2.0);
  CHECK(l_b >= 0.9);
}

TEST_CASE("upper support function dominates and saturates") {
  MetricChart mink = MetricChart::builtin("minkowski2d");
  BusemannField fwd = make_flat_field(mink, BusemannDirection::forward);
  std::vector<double> x{0.0, 0.2};
  UpperSupportReport rep = upper_support_check(fwd, x, 10.0, 1.0, 50, 0.1, 4);
  CHECK(rep.inequality_ok);
  CHECK(rep.equality_ok);

  std::vector<double> on_line{0.5, 0.0};
  UpperSupportReport rep2 = upper_support_check(fwd, on_line, 10.0, 1.0, 30, 0.05, 4);
  CHECK(rep2.inequality_ok);
  CHECK(rep2.equality_ok);

  MetricChart prod = MetricChart::builtin("product2d");
  BusemannField pf = make_flat_field(prod, BusemannDirection::forward);
  std::vector<double> px{0.1, 0.4};
  UpperSupportReport rep3 = upper_support_check(pf, px, 10.0, 0.5, 30, 0.1, 4);
  CHECK(rep3.inequality_ok);
  CHECK(rep3.equality_ok);
}

TEST_CASE("rebasing shifts finite-radius values by the offset") {
  for (const char* name : {"minkowski2d", "product2d"}) {
    MetricChart chart = MetricChart::builtin(name);
    BusemannField fwd = make_flat_field(chart, BusemannDirection::forward);

    const double delta = 1.0;
    LineSpec shifted = rebase_line(fwd.line(), delta);
    // align the schedules so both fields use the same witness points gamma(r)
    std::vector<double> shifted_schedule;
    for (double r : fwd.r_schedule()) shifted_schedule.push_back(r - delta);
    BusemannField fwd2(std::move(shifted), BusemannDirection::forward,
                       shifted_schedule);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      std::vector<double> p{u(rng), 0.5 * u(rng)};
      const auto& v1 = fwd.values_at(p);
      const auto& v2 = fwd2.values_at(p);
      for (size_t i = 0; i < v1.per_r.size(); ++i)
        worst = std::max(worst, std::abs(v2.per_r[i] - (v1.per_r[i] - delta)));
    }
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("equality of forward and backward limits near the line") {
  for (const char* name : {"minkowski2d", "product2d"}) {
    MetricChart chart = MetricChart::builtin(name);
    BusemannField fwd = make_flat_field(chart, BusemannDirection::forward);
    BusemannField bwd = make_flat_field(chart, BusemannDirection::backward);
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 8; ++k) {
      std::vector<double> p{0.5 * u(rng), 0.25 * u(rng)};
      const double bp = busemann_limit(fwd, p).limit;
      const double bm = busemann_limit(bwd, p).limit;
      CHECK(std::abs(bp - bm) <= 1e-4);
    }
  }
}

TEST_CASE("de sitter horizon: lipschitz blow-up and infinite values") {
  MetricChart ds = MetricChart::builtin("desitter2d");
  std::vector<double> base{0.0, 0.0}, tangent{1.0, 0.0};
  auto schedule = default_r_schedule(ds, base);
  LineSpec line = make_line(ds, base, tangent, schedule.back());
  BusemannField fwd(std::move(line), BusemannDirection::forward, schedule);

  const double r = schedule[2];  // deep but not maximal radius
  ScalarField br = [&](std::span<const double> p) { return fwd.value_r(p, r); };

  // widening bands approaching the causal horizon of gamma(r)
  Box inner{{-0.05, 0.05}, {0.0, 0.5}};
  Box outer{{-0.05, 0.05}, {1.15, 1.35}};
  const double l_inner = lipschitz_estimate(br, inner, 0.01, 12, 13);
  const double l_outer = lipschitz_estimate(br, outer, 0.01, 12, 13);
  CHECK(l_outer > 3.0 * l_inner);

  // beyond the horizon the finite-radius value is recorded as +inf
  int infinite = 0;
  for (double th : {2.0, 2.4, 2.8}) {
    std::vector<double> p{0.0, th};
    if (std::isinf(br(p))) ++infinite;
  }
  CHECK(infinite > 0);
}
