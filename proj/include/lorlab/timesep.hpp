#pragma once
// Time separation ell(x,y): supremum of Lorentzian arclength over
// future-directed causal curves, computed two independent ways —
// geodesic shooting, and projected gradient ascent of the discrete
// action over polyline curves — plus the reverse triangle inequality check.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lorlab/geodesic.hpp"
#include "lorlab/metric.hpp"

namespace lorlab {

struct CausalCurve {
  std::vector<std::vector<double>> nodes;  // sigma_0 = x ... sigma_N = y
  std::vector<char> chord_causal;          // midpoint-metric future-causal flags
};

// Straight coordinate chord with N segments; flags filled.
CausalCurve straight_chord_curve(const MetricChart& chart, std::span<const double> x,
                                 std::span<const double> y, int segments);
void refresh_chord_flags(const MetricChart& chart, CausalCurve& curve);

// Sum over chords of sqrt(g_mid(d,d)); throws NotCausal on a bad chord.
double action(const MetricChart& chart, const CausalCurve& curve);

enum class TimeSepMethod { shooting, action, closed_form };

struct TimeSep {
  double value = 0.0;  // -inf when not causally connectable
  TimeSepMethod method = TimeSepMethod::shooting;
  std::optional<Geodesic> witness_geod;
  std::optional<CausalCurve> witness_curve;
};

// Shooting: proper time of the connecting geodesic; -inf when the guess
// leaves the cone. NoConvergence propagates (callers fall back to the
// action method).
TimeSep ell_shooting(const MetricChart& chart, std::span<const double> x,
                     std::span<const double> y);

// Action ascent over polylines, hierarchically refined from a coarse curve
// up to `segments`; starts from the straight chord with a candidate/restart
// schedule to causalize the initializer. Returns -inf if no causal
// initializer is found within the restart budget (heuristic).
TimeSep ell_action(const MetricChart& chart, std::span<const double> x,
                   std::span<const double> y, int segments = 100, int iters = 60,
                   uint64_t seed = 0);

// Shooting with action fallback on NoConvergence.
TimeSep ell(const MetricChart& chart, std::span<const double> x,
            std::span<const double> y);

struct RtiReport {
  double l_xz = 0, l_xy = 0, l_yz = 0;
  double slack = 0;  // l_xz - (l_xy + l_yz), +inf on the vacuous branch
  double tol = 0;
  bool pass = false;
};

// Reverse triangle inequality l(x,z) >= l(x,y) + l(y,z), with the
// convention that a -inf summand makes the inequality vacuous.
RtiReport check_rti(const MetricChart& chart, std::span<const double> x,
                    std::span<const double> y, std::span<const double> z,
                    double tol = 1e-6);

}  // namespace lorlab
