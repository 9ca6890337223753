#include "lorlab/geodesic.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lorlab/errors.hpp"
#include "oracles.hpp"

using namespace lorlab;

namespace {
std::vector<double> pt(std::initializer_list<double> v) { return {v}; }

double norm2_at(const MetricChart& chart, const std::vector<double>& x,
                const std::vector<double>& v) {
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), chart.dim());
  return vv.dot(chart.components(x) * vv);
}
}  // namespace

TEST_CASE("integrate: flat straight lines") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto g1 = integrate(mink, pt({0, 0}), pt({1, 0}), 5.0);
  CHECK(g1.status == GeodesicStatus::complete);
  auto e1 = g1.point_at(5.0);
  CHECK(e1[0] == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(e1[1] == doctest::Approx(0.0));
  CHECK(g1.proper_time == doctest::Approx(5.0));

  auto g2 = integrate(mink, pt({0, 0}), pt({2, 1}), 1.0);
  auto e2 = g2.point_at(1.0);
  CHECK(e2[0] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(e2[1] == doctest::Approx(1.0).epsilon(1e-10));
  // zero norm drift in a constant metric
  for (const auto& s : g2.samples)
    CHECK(norm2_at(mink, s.x, s.v) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("integrate: de Sitter worldline and norm conservation") {
  auto ds = MetricChart::builtin("desitter2d");
  auto g = integrate(ds, pt({0, 0}), pt({1, 0}), 1.0);
  auto e = g.point_at(1.0);
  CHECK(e[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(e[1] == doctest::Approx(0.0));

  // a genuinely curved one: tilted initial velocity
  auto g2 = integrate(ds, pt({-0.5, 0.2}), pt({1, 0.3}), 2.0, 1e-9);
  const double n0 = norm2_at(ds, g2.samples.front().x, g2.samples.front().v);
  for (const auto& s : g2.samples) {
    CHECK(std::abs(norm2_at(ds, s.x, s.v) - n0) <= 1e-6 * std::abs(n0));
    CHECK(classify(ds, s.x, s.v).tag == CausalTag::timelike);
  }
}

TEST_CASE("integrate: exits the domain with boundary sample") {
  auto ds = MetricChart::builtin("desitter2d");
  auto g = integrate(ds, pt({3.0, 0}), pt({1, 0}), 5.0);
  CHECK(g.status == GeodesicStatus::exited_domain);
  CHECK(g.s_end < 5.0);
  CHECK(g.samples.back().x[0] == doctest::Approx(3.5).epsilon(1e-6));
}

TEST_CASE("exp_map basics") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto a = exp_map(mink, pt({0, 0}), pt({3, 0}));
  CHECK(a[0] == doctest::Approx(3.0));
  CHECK(a[1] == doctest::Approx(0.0));
  auto b = exp_map(mink, pt({1, 1}), pt({0, 0}));
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[1] == doctest::Approx(1.0));
  auto prod = MetricChart::builtin("product2d");
  auto c = exp_map(prod, pt({0, 0}), pt({1, 0.5}));
  CHECK(c[0] == doctest::Approx(1.0));
  CHECK(c[1] == doctest::Approx(0.5));
  CHECK_THROWS_AS(exp_map(MetricChart::builtin("desitter2d"), pt({3.0, 0}), pt({5, 0})),
                  OutOfDomain);
}

TEST_CASE("exp_map scaling consistency with dense output") {
  auto ds = MetricChart::builtin("desitter2d");
  auto x = pt({-0.3, 0.4});
  auto v = pt({1.1, 0.25});
  auto g = integrate(ds, x, v, 1.0, 1e-10);
  for (double s : {0.25, 0.5, 0.75}) {
    std::vector<double> sv = {s * v[0], s * v[1]};
    auto direct = exp_map(ds, x, sv, 1e-10);
    auto dense = g.point_at(s);
    CHECK(direct[0] == doctest::Approx(dense[0]).epsilon(1e-7));
    CHECK(direct[1] == doctest::Approx(dense[1]).epsilon(1e-7));
  }
}

TEST_CASE("shoot_bvp: flat and product closed forms") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto r = shoot_bvp(mink, pt({0, 0}), pt({2, 1}));
  CHECK(r.v[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.v[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.geod.proper_time == doctest::Approx(oracle::kSqrt3).epsilon(1e-9));

  auto prod = MetricChart::builtin("product2d");
  auto rp = shoot_bvp(prod, pt({0, 0}), pt({2, 1}));
  CHECK(rp.geod.proper_time == doctest::Approx(oracle::kSqrt3).epsilon(1e-9));

  CHECK_THROWS_AS(shoot_bvp(mink, pt({0, 0}), pt({1, 2})), NotCausallyConnectable);
  CHECK_THROWS_AS(shoot_bvp(mink, pt({0, 0}), pt({-2, 0})), NotCausallyConnectable);
}

TEST_CASE("shoot_bvp: de Sitter proper times match the embedding values") {
  auto ds = MetricChart::builtin("desitter2d");
  auto r1 = shoot_bvp(ds, pt({0, 0}), pt({1.2, 0.5}));
  CHECK(r1.geod.proper_time == doctest::Approx(oracle::kDsEll_00_to_12_05).epsilon(1e-8));
  auto r2 = shoot_bvp(ds, pt({-0.4, 0.1}), pt({0.9, 0.6}));
  CHECK(r2.geod.proper_time ==
        doctest::Approx(oracle::kDsEll_m04_01_to_09_06).epsilon(1e-8));
  // endpoint actually reached
  auto end = r1.geod.point_at(1.0);
  CHECK(end[0] == doctest::Approx(1.2).epsilon(1e-8));
  CHECK(end[1] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("shoot_bvp: near-horizon de Sitter pair") {
  auto ds = MetricChart::builtin("desitter2d");
  auto r = shoot_bvp(ds, pt({0, 0}), pt({2.0, 1.3}));
  CHECK(r.geod.proper_time == doctest::Approx(oracle::kDsEll_00_to_20_13).epsilon(1e-7));
}

TEST_CASE("norm conservation across built-in charts at tol 1e-9") {
  std::mt19937_64 rng(77);
  for (const auto& name : {"minkowski3d", "sphere3d", "desitter2d"}) {
    auto chart = MetricChart::builtin(name);
    const auto& box = chart.domain_box();
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x(static_cast<size_t>(chart.dim()));
      for (int i = 0; i < chart.dim(); ++i) {
        const double lo = std::max(box[static_cast<size_t>(i)][0], -2.0);
        const double hi = std::min(box[static_cast<size_t>(i)][1], 2.0);
        std::uniform_real_distribution<double> d(lo + 0.3, hi - 0.3);
        x[static_cast<size_t>(i)] = d(rng);
      }
      std::vector<double> v(static_cast<size_t>(chart.dim()), 0.0);
      v[0] = 1.0;
      std::uniform_real_distribution<double> dv(-0.3, 0.3);
      for (int i = 1; i < chart.dim(); ++i) v[static_cast<size_t>(i)] = dv(rng);
      auto g = integrate(chart, x, v, 1.0, 1e-9);
      const double n0 = norm2_at(chart, g.samples.front().x, g.samples.front().v);
      for (const auto& s : g.samples)
        CHECK(std::abs(norm2_at(chart, s.x, s.v) - n0) <= 1e-6 * std::abs(n0));
    }
  }
}
