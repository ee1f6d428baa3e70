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
#include <functional>

#include "prepspace/core.hpp"
#include "prepspace/random.hpp"

namespace prepspace {

// Uniform sampler for d(mu) = delta(sum p - 1) d^n p d^n phi: p uniform on the
// simplex, phi uniform on [0, 2pi)^n. Total volume (2pi)^n / (n-1)!.
//
// Samples are generated in fixed-size chunks; chunk c draws from its own
// substream derived from (seed, c), so any chunk can be produced on any
// thread and results do not depend on the worker count.
class MeasureSampler {
 public:
  MeasureSampler(int n, std::uint64_t seed, std::size_t chunk_size = 4096);

  int dim() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t chunk_size() const { return chunk_size_; }
  double volume() const;

  Rng chunk_rng(std::size_t chunk) const;
  Preparation draw(Rng& rng) const;

 private:
  int n_;
  std::uint64_t seed_;
  std::size_t chunk_size_;
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct McVectorEstimate {
  RVector estimate;
  RVector std_error;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

using Integrand = std::function<double(const Preparation&)>;
// Writes `out.size()` values for one sample.
using VectorIntegrand = std::function<void(const Preparation&, Eigen::Ref<RVector> out)>;

enum class Execution { serial, parallel };

// Worker count for parallel sampling: PREPSPACE_THREADS when set and
// positive, else every available core.
int sampling_threads();

// estimate = V * mean(g), std_error = V * stddev(g) / sqrt(N) over accepted
// samples. Samples where g is not finite are rejected; more than 0.1%
// rejections raise NumericalAbort. `samples` must be at least 1000.
//
// Execution::serial is the reference path; Execution::parallel runs chunks
// under OpenMP and reduces them in chunk order, so both return bit-identical
// results.
McEstimate mc_integrate(const Integrand& g, const MeasureSampler& sampler, std::size_t samples,
                        Execution exec = Execution::parallel);

McVectorEstimate mc_integrate(const VectorIntegrand& g, int components,
                              const MeasureSampler& sampler, std::size_t samples,
                              Execution exec = Execution::parallel);

}  // namespace prepspace
