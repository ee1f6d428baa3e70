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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace prepspace::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailure = 1,
  kExitUsage = 2,
  kExitNumericalAbort = 3,
  kExitInfeasible = 4,
};

struct EvolveArgs {
  std::string config;
  double t_final = 0.0;
  std::optional<double> step;
  std::optional<std::string> method;
  std::string out_dir;
};

// Writes <out>/trajectory.csv and <out>/summary.json.
int cmd_evolve(const EvolveArgs& args, std::ostream& log);

inline const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> names{"geometry", "symplectic", "correspondence",
                                              "statmech", "all"};
  return names;
}

struct VerifyArgs {
  std::string suite;
  int n = 2;
  std::uint64_t seed = 0;
  std::size_t samples = 20000;
  std::string out;
};

int cmd_verify(const VerifyArgs& args, std::ostream& log);

struct StatmechArgs {
  std::string config;
  double mean = 0.0;
  double t_final = 0.0;
  std::optional<std::size_t> samples;
  std::string out_dir;
};

// Writes <out>/report.json.
int cmd_statmech(const StatmechArgs& args, std::ostream& log);

// Parses the command line and maps errors onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prepspace::cli
