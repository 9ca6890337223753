#include "lorlab/timesep.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "lorlab/errors.hpp"
#include "oracles.hpp"

using namespace lorlab;

namespace {
std::vector<double> pt(std::initializer_list<double> v) { return {v}; }

// Random future-timelike-connected pair with interior margin.
struct PairGen {
  std::mt19937_64 rng;
  explicit PairGen(uint64_t seed) : rng(seed) {}

  std::pair<std::vector<double>, std::vector<double>> connected(const MetricChart& chart,
                                                                double t_scale) {
    const auto& box = chart.domain_box();
    const int n = chart.dim();
    for (;;) {
      std::vector<double> x(static_cast<size_t>(n)), v(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double lo = std::max(box[static_cast<size_t>(i)][0], -3.0);
        const double hi = std::min(box[static_cast<size_t>(i)][1], 3.0);
        std::uniform_real_distribution<double> d(lo + 0.4, hi - 0.4);
        x[static_cast<size_t>(i)] = d(rng);
      }
      std::uniform_real_distribution<double> dt(0.4 * t_scale, t_scale);
      std::uniform_real_distribution<double> dsp(-0.3, 0.3);
      v[0] = dt(rng);
      for (int i = 1; i < n; ++i) v[static_cast<size_t>(i)] = dsp(rng) * v[0];
      if (classify(chart, x, v).tag != CausalTag::timelike) continue;
      try {
        auto y = exp_map(chart, x, v);
        if (!chart.in_domain(y, 0.05)) continue;
        return {x, y};
      } catch (const Error&) {
        continue;
      }
    }
  }

  std::vector<double> interior_point(const MetricChart& chart) {
    const auto& box = chart.domain_box();
    const int n = chart.dim();
    std::vector<double> x(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const double lo = std::max(box[static_cast<size_t>(i)][0], -3.0);
      const double hi = std::min(box[static_cast<size_t>(i)][1], 3.0);
      std::uniform_real_distribution<double> d(lo + 0.3, hi - 0.3);
      x[static_cast<size_t>(i)] = d(rng);
    }
    return x;
  }
};
}  // namespace

TEST_CASE("action of explicit curves") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto straight = straight_chord_curve(mink, pt({0, 0}), pt({2, 1}), 1);
  CHECK(action(mink, straight) == doctest::Approx(oracle::kSqrt3).epsilon(1e-12));

  CausalCurve bent;
  bent.nodes = {{0, 0}, {1, 0.9}, {2, 0}};
  refresh_chord_flags(mink, bent);
  CHECK(action(mink, bent) == doctest::Approx(oracle::kTwoSqrt019).epsilon(1e-10));
  CHECK(action(mink, bent) < 2.0);  // strictly below the straight line value

  CausalCurve null_chord;
  null_chord.nodes = {{0, 0}, {1, 1}};
  refresh_chord_flags(mink, null_chord);
  CHECK(action(mink, null_chord) == doctest::Approx(0.0));

  CausalCurve bad;
  bad.nodes = {{0, 0}, {0.2, 1}};
  refresh_chord_flags(mink, bad);
  CHECK(bad.chord_causal[0] == 0);
  CHECK_THROWS_AS(action(mink, bad), NotCausal);
}

TEST_CASE("ell_shooting closed forms and -inf") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto a = ell_shooting(mink, pt({0, 0}), pt({2, 1}));
  CHECK(a.value == doctest::Approx(oracle::kSqrt3).epsilon(1e-9));
  CHECK(a.witness_geod.has_value());

  auto b = ell_shooting(mink, pt({0, 0}), pt({1, 2}));
  CHECK(std::isinf(b.value));
  CHECK(b.value < 0);

  auto prod = MetricChart::builtin("product2d");
  auto c = ell_shooting(prod, pt({0, 0}), pt({2, 1}));
  CHECK(c.value == doctest::Approx(oracle::kSqrt3).epsilon(1e-9));

  auto d = ell_shooting(mink, pt({0.7, -0.3}), pt({0.7, -0.3}));
  CHECK(d.value == doctest::Approx(0.0));
}

TEST_CASE("ell_action flat examples") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto a = ell_action(mink, pt({0, 0}), pt({3, 0}), 50);
  CHECK(a.value == doctest::Approx(3.0).epsilon(1e-3));
  auto b = ell_action(mink, pt({0, 0}), pt({2, 1}), 100);
  CHECK(b.value == doctest::Approx(oracle::kSqrt3).epsilon(1e-3));
  auto c = ell_action(mink, pt({0, 0}), pt({1, 2}), 50);
  CHECK(std::isinf(c.value));
  CHECK(c.value < 0);
}

TEST_CASE("ell_action agrees with shooting on de Sitter") {
  auto ds = MetricChart::builtin("desitter2d");
  auto s = ell_shooting(ds, pt({0, 0}), pt({1, 0}));
  auto a = ell_action(ds, pt({0, 0}), pt({1, 0}), 100);
  CHECK(a.value == doctest::Approx(s.value).epsilon(1e-3));
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-9));

  auto s2 = ell_shooting(ds, pt({0, 0}), pt({1.2, 0.5}));
  auto a2 = ell_action(ds, pt({0, 0}), pt({1.2, 0.5}), 100);
  CHECK(s2.value == doctest::Approx(oracle::kDsEll_00_to_12_05).epsilon(1e-8));
  CHECK(std::abs(a2.value - s2.value) <= 2e-3);
}

TEST_CASE("ell_action refinement monotonicity") {
  auto ds = MetricChart::builtin("desitter2d");
  auto x = pt({-0.4, 0.1});
  auto y = pt({0.9, 0.6});
  const double v25 = ell_action(ds, x, y, 25).value;
  const double v50 = ell_action(ds, x, y, 50).value;
  const double v100 = ell_action(ds, x, y, 100).value;
  CHECK(v50 >= v25 - 1e-9);
  CHECK(v100 >= v50 - 1e-9);
}

TEST_CASE("method agreement on random connected pairs") {
  for (const char* name : {"minkowski2d", "product2d", "desitter2d"}) {
    auto chart = MetricChart::builtin(name);
    PairGen gen(0xabcdef ^ std::hash<std::string>{}(name));
    const double t_scale = std::string(name) == "desitter2d" ? 1.2 : 2.0;
    for (int trial = 0; trial < 10; ++trial) {
      auto [x, y] = gen.connected(chart, t_scale);
      auto s = ell_shooting(chart, x, y);
      auto a = ell_action(chart, x, y, 100);
      REQUIRE(!std::isinf(s.value));
      CHECK(std::abs(s.value - a.value) <= 2e-3);
    }
  }
}

TEST_CASE("check_rti examples") {
  auto mink = MetricChart::builtin("minkowski2d");
  auto r1 = check_rti(mink, pt({0, 0}), pt({1, 0}), pt({3, 0}));
  CHECK(r1.pass);
  CHECK(r1.slack == doctest::Approx(0.0).epsilon(1e-8));

  auto r2 = check_rti(mink, pt({0, 0}), pt({1, 0.5}), pt({2, 0}));
  CHECK(r2.pass);
  CHECK(r2.slack > 0.1);

  auto r3 = check_rti(mink, pt({0, 0}), pt({0, 5}), pt({1, 0}));
  CHECK(r3.pass);  // l(x,y) = -inf: vacuous
  CHECK(std::isinf(r3.slack));
}

TEST_CASE("RTI on random triples per chart") {
  for (const char* name : {"minkowski2d", "minkowski3d", "product2d", "desitter2d"}) {
    auto chart = MetricChart::builtin(name);
    PairGen gen(0x5151 ^ std::hash<std::string>{}(name));
    for (int trial = 0; trial < 40; ++trial) {
      auto x = gen.interior_point(chart);
      auto y = gen.interior_point(chart);
      auto z = gen.interior_point(chart);
      auto r = check_rti(chart, x, y, z);
      CHECK(r.pass);
    }
  }
}
