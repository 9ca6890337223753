#include "lorlab/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace lorlab {

CheckRecord make_record(std::string name, int index, nlohmann::json inputs,
                        double value, double tolerance, bool expected_fail,
                        std::string note, nlohmann::json detail) {
  CheckRecord r;
  r.name = std::move(name);
  r.index = index;
  r.inputs = std::move(inputs);
  r.value = value;
  r.tolerance = tolerance;
  r.pass = value <= tolerance;
  r.expected_fail = expected_fail;
  r.note = std::move(note);
  r.detail = std::move(detail);
  return r;
}

void Report::sort_records() {
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) {
                     if (a.name != b.name) return a.name < b.name;
                     return a.index < b.index;
                   });
}

int Report::passed() const {
  int n = 0;
  for (const auto& r : records) n += r.pass ? 1 : 0;
  return n;
}

int Report::failed() const { return static_cast<int>(records.size()) - passed(); }

int Report::expected_failures() const {
  int n = 0;
  for (const auto& r : records) n += (r.expected_fail && !r.pass) ? 1 : 0;
  return n;
}

bool Report::all_ok() const {
  for (const auto& r : records)
    if (!r.ok()) return false;
  return true;
}

namespace {
// JSON has no literal for non-finite numbers; encode them as strings so a
// record with an infinite measurement still round-trips.
nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "+inf" : "-inf";
}
}  // namespace

std::string Report::to_json() const {
  Report sorted = *this;
  sorted.sort_records();
  nlohmann::json j;
  j["command"] = command;
  j["scenario"] = scenario_echo;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : sorted.records) {
    nlohmann::json e;
    e["name"] = r.name;
    e["index"] = r.index;
    e["inputs"] = r.inputs;
    e["value"] = json_number(r.value);
    e["tolerance"] = r.tolerance;
    e["pass"] = r.pass;
    e["expected_fail"] = r.expected_fail;
    if (!r.note.empty()) e["note"] = r.note;
    if (!r.detail.is_null()) e["detail"] = r.detail;
    recs.push_back(e);
  }
  j["records"] = recs;
  j["summary"] = {{"checks", records.size()},
                  {"passed", passed()},
                  {"failed", failed()},
                  {"expected_failures", expected_failures()},
                  {"all_ok", all_ok()}};
  j["timing"] = {{"wall_time_s", wall_time_s}};
  return j.dump(2) + "\n";
}

std::string Report::to_csv() const {
  Report sorted = *this;
  sorted.sort_records();
  std::ostringstream os;
  os << "name,index,value,tolerance,pass,expected_fail,note\n";
  char buf[64];
  for (const auto& r : sorted.records) {
    os << r.name << "," << r.index << ",";
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    os << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", r.tolerance);
    os << buf << "," << (r.pass ? 1 : 0) << "," << (r.expected_fail ? 1 : 0)
       << "," << r.note << "\n";
  }
  return os.str();
}

}  // namespace lorlab
