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
#include <string>

#include <json.hpp>

#include "prepspace/core.hpp"
#include "prepspace/dynamics.hpp"

namespace prepspace::cli {

// A malformed or inconsistent config file. The message names the offending
// field as a path such as `hamiltonian.matrix[1][0]`.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// How a matrix was specified; kept for the reports.
enum class MatrixSource { dense, diagonal, random_hermitian, hamiltonian };

struct MatrixSpec {
  CMatrix matrix;
  MatrixSource source = MatrixSource::dense;
};

struct ExperimentConfig {
  int n = 0;
  std::uint64_t seed = 0;

  std::optional<MatrixSpec> hamiltonian;
  std::optional<MatrixSpec> observable;
  // Q for the expectation table of `statmech`; defaults to the observable.
  std::optional<MatrixSpec> probe;
  std::optional<Preparation> initial;

  EvolveOptions integrator;

  std::size_t samples = 100000;
  std::size_t chunk_size = 4096;
  // Samples for integrals over time-evolved ensembles, where every sample
  // costs a backward flow.
  std::size_t flow_samples = 4000;
  double flow_step = 1e-2;
  int probe_points = 100;
  int time_points = 5;

  ToleranceConfig tolerances;
};

// Resolves generators (random matrices draw from the "frame" substream,
// random initial points from "init") so the result is fully concrete.
ExperimentConfig parse_config(const nlohmann::json& j);

// Reads and parses a JSON file. Syntax errors report line and column.
ExperimentConfig load_config(const std::string& path);

nlohmann::json matrix_to_json(const CMatrix& m);
std::string to_string(MatrixSource source);

}  // namespace prepspace::cli
