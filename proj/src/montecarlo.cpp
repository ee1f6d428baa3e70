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

#include "prepspace/montecarlo.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <sstream>
#include <string>
#include <vector>

#ifdef PREPSPACE_HAVE_OPENMP
#include <omp.h>
#endif

namespace prepspace {

MeasureSampler::MeasureSampler(int n, std::uint64_t seed, std::size_t chunk_size)
    : n_(n), seed_(seed), chunk_size_(chunk_size) {
  if (n < 2) throw ValidationError("sampler dimension must be at least 2");
  if (chunk_size == 0) throw ValidationError("chunk size must be positive");
}

double MeasureSampler::volume() const {
  return std::pow(kTwoPi, n_) / std::tgamma(static_cast<double>(n_));
}

Rng MeasureSampler::chunk_rng(std::size_t chunk) const {
  return make_rng(substream_seed(seed_, static_cast<std::uint64_t>(chunk)));
}

Preparation MeasureSampler::draw(Rng& rng) const {
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  RVector p = uniform_simplex(n_, rng);
  RVector phi(n_);
  for (int i = 0; i < n_; ++i) phi[i] = angle(rng);
  return Preparation::make(std::move(p), std::move(phi));
}

int sampling_threads() {
  if (const char* env = std::getenv("PREPSPACE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
#ifdef PREPSPACE_HAVE_OPENMP
  return omp_get_num_procs();
#else
  return 1;
#endif
}

namespace {

// Running mean / sum of squared deviations per component (Welford).
struct ChunkStats {
  std::size_t count = 0;
  std::size_t rejected = 0;
  RVector mean;
  RVector m2;

  explicit ChunkStats(int components)
      : mean(RVector::Zero(components)), m2(RVector::Zero(components)) {}

  void add(const RVector& x) {
    ++count;
    const RVector delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta.cwiseProduct(x - mean);
  }

  // Chan et al. pairwise combination.
  void merge(const ChunkStats& other) {
    if (other.count == 0) {
      rejected += other.rejected;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double total = na + nb;
    const RVector delta = other.mean - mean;
    mean += delta * (nb / total);
    m2 += other.m2 + delta.cwiseProduct(delta) * (na * nb / total);
    count += other.count;
    rejected += other.rejected;
  }
};

ChunkStats run_chunk(const VectorIntegrand& g, int components, const MeasureSampler& sampler,
                     std::size_t chunk, std::size_t begin, std::size_t end) {
  ChunkStats stats(components);
  Rng rng = sampler.chunk_rng(chunk);
  RVector value(components);
  for (std::size_t s = begin; s < end; ++s) {
    const Preparation z = sampler.draw(rng);
    g(z, value);
    if (value.allFinite()) {
      stats.add(value);
    } else {
      ++stats.rejected;
    }
  }
  return stats;
}

McVectorEstimate finish(const std::vector<ChunkStats>& chunks, int components,
                        const MeasureSampler& sampler, std::size_t samples) {
  ChunkStats total(components);
  for (const ChunkStats& c : chunks) total.merge(c);
  if (static_cast<double>(total.rejected) > 1e-3 * static_cast<double>(samples) ||
      total.count < 2) {
    std::ostringstream os;
    os << "Monte-Carlo integrand was non-finite on " << total.rejected << " of " << samples
       << " samples";
    throw NumericalAbort(os.str());
  }
  const double v = sampler.volume();
  const double n = static_cast<double>(total.count);
  McVectorEstimate out;
  out.estimate = v * total.mean;
  out.std_error = v * (total.m2 / (n - 1.0)).cwiseMax(0.0).cwiseSqrt() / std::sqrt(n);
  out.accepted = total.count;
  out.rejected = total.rejected;
  return out;
}

}  // namespace

McVectorEstimate mc_integrate(const VectorIntegrand& g, int components,
                              const MeasureSampler& sampler, std::size_t samples,
                              Execution exec) {
  if (samples < 1000) throw ValidationError("Monte-Carlo integration needs at least 1000 samples");
  if (components < 1) throw ValidationError("integrand must have at least one component");
  const std::size_t chunk = sampler.chunk_size();
  const std::size_t n_chunks = (samples + chunk - 1) / chunk;
  std::vector<ChunkStats> stats(n_chunks, ChunkStats(components));

  if (exec == Execution::serial) {
    for (std::size_t c = 0; c < n_chunks; ++c) {
      stats[c] = run_chunk(g, components, sampler, c, c * chunk, std::min(samples, (c + 1) * chunk));
    }
  } else {
    std::exception_ptr failure;
    const auto chunks = static_cast<long>(n_chunks);
#ifdef PREPSPACE_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(sampling_threads())
#endif
    for (long c = 0; c < chunks; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      try {
        stats[uc] = run_chunk(g, components, sampler, uc, uc * chunk,
                              std::min(samples, (uc + 1) * chunk));
      } catch (...) {
#ifdef PREPSPACE_HAVE_OPENMP
#pragma omp critical(prepspace_mc_failure)
#endif
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  return finish(stats, components, sampler, samples);
}

McEstimate mc_integrate(const Integrand& g, const MeasureSampler& sampler, std::size_t samples,
                        Execution exec) {
  const McVectorEstimate v = mc_integrate(
      [&g](const Preparation& z, Eigen::Ref<RVector> out) { out[0] = g(z); }, 1, sampler,
      samples, exec);
  return {v.estimate[0], v.std_error[0], v.accepted, v.rejected};
}

}  // namespace prepspace
