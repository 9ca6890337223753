#pragma once
// Check records and deterministic run reports. Every record normalizes its
// measurement to one rule — pass iff value <= tolerance — so pass/fail is
// recomputable from the value and tolerance fields alone; raw measurements
// ride in `detail` and the inputs needed to re-run the single check ride in
// `inputs`. Serialization orders records by (name, index) and keeps wall
// time in a separate timing field so identical scenarios produce identical
// report bytes.

#include <string>
#include <vector>

#include "json.hpp"

namespace lorlab {

struct CheckRecord {
  std::string name;        // check family
  int index = 0;           // input index within the sweep
  nlohmann::json inputs;   // enough to re-run this single check in isolation
  double value = 0.0;      // normalized violation measure
  double tolerance = 0.0;
  bool pass = false;       // always equals value <= tolerance
  bool expected_fail = false;  // labeled pathology probe: failing is correct
  std::string note;        // optional label for the reader
  nlohmann::json detail;   // raw measured quantities

  // A record is in its expected state when pass != expected_fail.
  bool ok() const { return pass != expected_fail; }
};

CheckRecord make_record(std::string name, int index, nlohmann::json inputs,
                        double value, double tolerance,
                        bool expected_fail = false, std::string note = "",
                        nlohmann::json detail = nlohmann::json());

struct Report {
  std::string command;
  nlohmann::json scenario_echo;
  std::vector<CheckRecord> records;
  double wall_time_s = 0.0;  // excluded from the determinism guarantee

  void sort_records();  // by (name, index)
  int passed() const;
  int failed() const;
  int expected_failures() const;  // records with expected_fail that did fail
  bool all_ok() const;

  std::string to_json() const;  // timing in a separate top-level object
  std::string to_csv() const;   // plot data: one row per record
};

}  // namespace lorlab
