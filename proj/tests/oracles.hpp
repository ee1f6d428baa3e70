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

// Test-only reference computations. Everything here works directly on complex
// amplitudes and matrices and does not call the library routine it checks.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;

inline CVector psi_of(const RVector& p, const RVector& phi) {
  CVector psi(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) psi[i] = std::sqrt(p[i]) * std::exp(Complex(0, phi[i]));
  return psi;
}

// Phase difference reduced to (-pi, pi].
inline double angle_diff(double a, double b) {
  double d = std::remainder(a - b, 2.0 * kPi);
  if (d <= -kPi) d += 2.0 * kPi;
  return d;
}

// exp(-i H t) by Pade scaling-and-squaring (Eigen MatrixFunctions).
inline CMatrix propagator(const CMatrix& h, double t) {
  const CMatrix a = Complex(0.0, -t) * h;
  return a.exp();
}

// p_dot, phi_dot from i psi_dot = H psi.
inline std::pair<RVector, RVector> schrodinger_projection(const CMatrix& h, const CVector& psi) {
  const CVector hpsi = h * psi;
  RVector pdot(psi.size()), phidot(psi.size());
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    pdot[i] = 2.0 * (hpsi[i] * std::conj(psi[i])).imag();
    phidot[i] = -(hpsi[i] / psi[i]).real();
  }
  return {pdot, phidot};
}

// Uniform simplex point from sorted uniform order statistics (a different
// construction from the library's normalized exponentials).
template <class Rng>
RVector simplex_by_spacings(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> cuts(static_cast<size_t>(n - 1));
  for (double& c : cuts) c = u(rng);
  std::sort(cuts.begin(), cuts.end());
  RVector p(n);
  double prev = 0.0;
  for (int i = 0; i < n - 1; ++i) {
    p[i] = cuts[static_cast<size_t>(i)] - prev;
    prev = cuts[static_cast<size_t>(i)];
  }
  p[n - 1] = 1.0 - prev;
  return p;
}

// Mean and standard error of a list of samples.
struct Stats {
  double mean;
  double std_error;
};

inline Stats stats(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace oracle
