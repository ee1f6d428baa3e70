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

#include "prepspace/random.hpp"

#include <cmath>

namespace prepspace {

namespace {

// splitmix64 finalizer
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t seed, std::string_view name) {
  // FNV-1a over the name, then mixed with the parent seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(mix(seed) ^ h);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix(mix(seed) ^ mix(index + 0x51ed270b27a4b1f3ULL));
}

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

RVector uniform_simplex(int n, Rng& rng) {
  std::exponential_distribution<double> exp1(1.0);
  RVector p(n);
  for (int i = 0; i < n; ++i) p[i] = exp1(rng);
  return p / p.sum();
}

CMatrix haar_unitary(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) z(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

CMatrix random_hermitian(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(gauss(rng), gauss(rng));
  CMatrix h = (a + a.adjoint()) / (2.0 * std::sqrt(static_cast<double>(n)));
  // Force exact Hermiticity on the diagonal.
  for (int i = 0; i < n; ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return h;
}

Preparation random_interior_preparation(int n, Rng& rng, double min_p) {
  if (!(min_p * n < 1.0)) throw ValidationError("min_p too large for dimension");
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  RVector p;
  do {
    p = uniform_simplex(n, rng);
  } while (p.minCoeff() < min_p);
  RVector phi(n);
  for (int i = 0; i < n; ++i) phi[i] = angle(rng);
  return Preparation::make(std::move(p), std::move(phi));
}

CVector random_state(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

}  // namespace prepspace
