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

#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <json.hpp>

#include "prepspace/core.hpp"

namespace prepspace::cli {

inline constexpr const char* kSchema = "prepspace-report/1";
inline constexpr const char* kVersion = "0.1.0";

// One pass/fail record. `relation` says how `measured` is compared with
// `tolerance`: "<", "<=" or ">=".
struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation;
  bool passed = false;
};

class CheckList {
 public:
  // measured < tolerance. NaN fails.
  void less(std::string name, double measured, double tolerance);
  void at_most(std::string name, double measured, double tolerance);
  void at_least(std::string name, double measured, double tolerance);
  // A failure with no numeric content, e.g. an abort inside a check.
  void failed(std::string name, std::string reason);

  bool all_passed() const;
  const std::vector<Check>& checks() const { return checks_; }
  nlohmann::json to_json() const;

 private:
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, std::string>> failures_;
};

// {"schema": ..., "version": ..., "command": ...}
nlohmann::json report_header(const std::string& command);

nlohmann::json vector_to_json(const RVector& v);
nlohmann::json real_matrix_to_json(const RMatrix& m);

// Pretty-printed with a trailing newline. Throws Error when the file cannot
// be written.
void write_json(const std::string& path, const nlohmann::json& j);

// %.17g
std::string csv_number(double x);

// Differences below this are round-off, even for zero-variance estimators.
inline constexpr double kRoundoffFloor = 1e-12;

// |difference| in units of std_error after removing slack and round-off.
double z_score(double difference, double std_error, double slack = 0.0);

// Wall-clock timing, written to a sidecar so reports stay byte-identical.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const;

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_timing(const std::string& path, const std::string& command, double seconds);

}  // namespace prepspace::cli
