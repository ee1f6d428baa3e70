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

#include <cstdint>
#include <random>
#include <string_view>

#include "prepspace/core.hpp"

namespace prepspace {

using Rng = std::mt19937_64;

// Deterministic child seed for a named substream ("frame", "init", "mc", ...).
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

Rng make_rng(std::uint64_t seed);

// Uniform point on the probability simplex (normalized unit exponentials).
RVector uniform_simplex(int n, Rng& rng);

// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases of
// R's diagonal folded back into Q.
CMatrix haar_unitary(int n, Rng& rng);

// (A + A^dagger) / (2 sqrt(n)) for a complex Gaussian A; spectrum is O(1).
CMatrix random_hermitian(int n, Rng& rng);

// Uniform simplex point conditioned on min p_i >= min_p, uniform phases.
Preparation random_interior_preparation(int n, Rng& rng, double min_p = 1e-2);

// Random complex unit vector.
CVector random_state(int n, Rng& rng);

}  // namespace prepspace
