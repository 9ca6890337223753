#pragma once
// Scenario-driven verification runs: a single JSON-configurable description
// of a chart, an observer line, exponents, probe regions, and sampling
// budgets, plus one runner per CLI subcommand. Every runner emits a Report
// whose records follow the universal rule pass <=> value <= tolerance, so a
// report is re-checkable from its own numbers. Fixed seeds make the report
// bytes reproducible (wall time lives in a separate timing field).

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lorlab/busemann.hpp"
#include "lorlab/metric.hpp"
#include "lorlab/report.hpp"

namespace lorlab {

// Full description of one verification run. Unset fields take per-chart
// defaults; scalar CLI flags override individual fields after load.
struct Scenario {
  // Chart spec: a built-in name or a path to a metric-spec JSON file.
  std::string chart = "minkowski2d";

  // Observer line through `base` with initial velocity `tangent`
  // (renormalized to unit future timelike by the line builder).
  std::vector<double> base;
  std::vector<double> tangent;

  // Operator exponents to sweep (degenerate-elliptic regime p < 1, p != 0).
  std::vector<double> p_list = {-1.0, 0.5};

  // Finite radii for Busemann-type limits; empty means the chart default.
  std::vector<double> r_schedule;

  // Probe boxes. regions[0] is the primary sampling box near the line;
  // any further regions are widening bands for the Lipschitz growth probe.
  std::vector<Box> regions;

  // Sampling budget per check family, RNG seed, named tolerance overrides.
  int samples = 100;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;

  // Output directory and report format ("json" writes the full report plus
  // the per-check CSV; "csv" writes only the CSV).
  std::string out_dir = "lorlab_out";
  std::string format = "json";

  // True on charts where the sampled observer admits no complete maximizing
  // line (horizon charts): runners swap in the finite-radius controls and
  // mark the divergence records as expected failures.
  bool expect_pathology = false;

  static Scenario defaults(const std::string& chart_name);
  static Scenario from_json_text(const std::string& text);
  static Scenario from_json_file(const std::string& path);

  MetricChart make_chart() const;          // resolves built-in name or file
  LineSpec make_line(const MetricChart&) const;
  std::vector<double> schedule(const MetricChart&) const;
  double tol(const std::string& name, double fallback) const;

  // Throws ConfigError naming the offending field (dimension mismatches,
  // regions outside the chart domain, bad format or exponent values).
  void validate(const MetricChart&) const;

  std::string to_json() const;  // resolved configuration echo
};

// One runner per subcommand. Each validates the scenario, runs its check
// list, and returns a sorted Report (records ordered by name, then index).
Report run_timesep(const Scenario&);
Report run_busemann(const Scenario&);
Report run_comparison(const Scenario&);
Report run_bochner(const Scenario&);
Report run_split(const Scenario&);

// Dispatch by subcommand name with wall-time measurement. Throws ConfigError
// on an unknown command.
Report run_command(const std::string& command, const Scenario&);

// Writes <command>_report.json (when format == "json"), <command>_checks.csv
// (always), and one <command>_<name>_<index>.csv per record carrying a "csv"
// detail entry, into scenario.out_dir (created if missing).
void write_report_files(const Scenario&, const Report&);

}  // namespace lorlab
