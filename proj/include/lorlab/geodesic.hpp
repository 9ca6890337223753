#pragma once
// Geodesic integration (adaptive embedded Runge-Kutta 5(4) with cubic
// Hermite dense output), the exponential map, and a two-point boundary
// solver by damped-Newton shooting on the endpoint map.

#include <span>
#include <vector>

#include "lorlab/metric.hpp"

namespace lorlab {

struct GeodesicSample {
  double s;
  std::vector<double> x;
  std::vector<double> v;
};

enum class GeodesicStatus { complete, exited_domain };

struct Geodesic {
  int n = 0;
  std::vector<GeodesicSample> samples;  // accepted integrator steps
  CausalClass causal_class;             // classification of the initial tangent
  double proper_time = 0.0;             // Lorentzian length when causal, else 0
  GeodesicStatus status = GeodesicStatus::complete;
  double s_end = 0.0;

  // Cubic Hermite dense output on [0, s_end] (clamped outside).
  std::vector<double> point_at(double s) const;
  std::vector<double> velocity_at(double s) const;
};

// Solves x''^k + Gamma^k_ij x'^i x'^j = 0 from (x0, v0) up to s_max.
// Stops at the chart boundary with status exited_domain.
Geodesic integrate(const MetricChart& chart, std::span<const double> x0,
                   std::span<const double> v0, double s_max, double tol = 1e-9);

// Endpoint of the unit-parameter geodesic; throws OutOfDomain if the
// trajectory leaves the chart before s = 1.
std::vector<double> exp_map(const MetricChart& chart, std::span<const double> x,
                            std::span<const double> v, double tol = 1e-9);

struct ShootResult {
  std::vector<double> v;  // tangent with exp_map(x, v) = y
  Geodesic geod;
};

// Damped Newton on v -> exp_map(x, v) - y with forward-difference Jacobian.
// Empty v_guess uses the chart straight-line difference y - x.
ShootResult shoot_bvp(const MetricChart& chart, std::span<const double> x,
                      std::span<const double> y,
                      std::span<const double> v_guess = {}, double tol = 1e-9);

}  // namespace lorlab
