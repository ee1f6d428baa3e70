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

// Serial reference against the OpenMP path of the Monte-Carlo kernels.
// Thread count follows PREPSPACE_THREADS.

#include <benchmark/benchmark.h>

#include "prepspace/statmech.hpp"

namespace {

using namespace prepspace;

MaxEntSolution two_level() {
  RVector f(2);
  f << 0.0, 1.0;
  return solve_maxent(f, 0.25);
}

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_RhoReconstruct(benchmark::State& state) {
  const EnsembleDistribution w = w0_build(two_level());
  const MeasureSampler sampler(2, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho_reconstruct(w, sampler, 200000, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * 200000);
}
BENCHMARK(BM_RhoReconstruct)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Every sample runs a backward characteristic, so this is the expensive case.
void BM_LiouvilleExpectation(benchmark::State& state) {
  const MaxEntSolution sol = two_level();
  CMatrix h(2, 2);
  h << 0.3, Complex(0.5, -0.2), Complex(0.5, 0.2), -0.4;
  EvolveOptions opt;
  opt.step = 1e-2;
  const EnsembleDistribution w =
      liouville_evolve(w0_build(sol), ScalarVariable(validate_hermitian(h)), 1.0, opt);
  const MeasureSampler sampler(2, 2, 256);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ensemble_expectation(w, h, sampler, 2000, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_LiouvilleExpectation)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
