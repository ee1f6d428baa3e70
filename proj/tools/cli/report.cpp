// Copyright 2026 The prepspace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace prepspace::cli {

using nlohmann::json;

void CheckList::less(std::string name, double measured, double tolerance) {
  checks_.push_back({std::move(name), measured, tolerance, "<", measured < tolerance});
}

void CheckList::at_most(std::string name, double measured, double tolerance) {
  checks_.push_back({std::move(name), measured, tolerance, "<=", measured <= tolerance});
}

void CheckList::at_least(std::string name, double measured, double tolerance) {
  checks_.push_back({std::move(name), measured, tolerance, ">=", measured >= tolerance});
}

void CheckList::failed(std::string name, std::string reason) {
  failures_.emplace_back(std::move(name), std::move(reason));
}

bool CheckList::all_passed() const {
  if (!failures_.empty()) return false;
  for (const Check& c : checks_)
    if (!c.passed) return false;
  return true;
}

json CheckList::to_json() const {
  json out = json::array();
  for (const Check& c : checks_) {
    out.push_back({{"name", c.name},
                   {"measured", c.measured},
                   {"relation", c.relation},
                   {"tolerance", c.tolerance},
                   {"passed", c.passed}});
  }
  for (const auto& [name, reason] : failures_) {
    out.push_back({{"name", name}, {"error", reason}, {"passed", false}});
  }
  return out;
}

json report_header(const std::string& command) {
  return {{"schema", kSchema}, {"version", kVersion}, {"command", command}};
}

json vector_to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json real_matrix_to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
  return rows;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw Error("failed writing " + path);
}

double z_score(double difference, double std_error, double slack) {
  const double excess = std::max(0.0, std::abs(difference) - slack - kRoundoffFloor);
  if (excess == 0.0) return 0.0;
  return std_error > 0.0 ? excess / std_error : std::numeric_limits<double>::infinity();
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double Stopwatch::seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
}

void write_timing(const std::string& path, const std::string& command, double seconds) {
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  write_json(path, {{"schema", kSchema},
                    {"command", command},
                    {"finished_at", stamp},
                    {"wall_clock_seconds", seconds}});
}

}  // namespace prepspace::cli
