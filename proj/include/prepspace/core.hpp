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

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace prepspace {

using Complex = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Error hierarchy. Every failure raised by the library derives from Error so
// callers (the CLI in particular) can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An input violates a stated invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The (p, phi) chart is singular at the evaluation point (some p_i ~ 0).
class SingularChartError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure could not complete (boundary proximity, Newton
// failure, excessive Monte-Carlo rejections).
class NumericalAbort : public Error {
 public:
  using Error::Error;
};

// An internal consistency check failed. Indicates a bug, not bad input.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// Solver tolerances shared across modules. All values must be positive.
struct ToleranceConfig {
  double validation_tol = 1e-12;
  double gradient_fd_step = 1e-6;
  double ode_step = 1e-3;
  double mc_rel_tol = 1e-2;
  double root_tol = 1e-12;

  void validate() const;
};

// Reduce an angle to [0, 2pi).
double wrap_phase(double angle);

// Reduce an angle difference to (-pi, pi].
double wrap_phase_difference(double delta);

// A point of preparation space: outcome probabilities p on the simplex and
// phases phi on the torus, relative to one measurement frame.
//
// Components with p_i below the validation tolerance have no meaningful phase;
// their phase is pinned to 0 and the component is flagged as degenerate.
class Preparation {
 public:
  // Validates sum(p) == 1 within `sum_tol`, p_i >= 0 (entries in [-sum_tol, 0)
  // are clamped to 0), n >= 2, and reduces phases modulo 2pi.
  static Preparation make(RVector p, RVector phi, double validation_tol = 1e-12,
                          double sum_tol = 1e-12);

  int dim() const { return static_cast<int>(p_.size()); }
  const RVector& p() const { return p_; }
  const RVector& phi() const { return phi_; }
  const std::vector<bool>& degenerate() const { return degenerate_; }
  bool has_degenerate_phase() const;

  // True when every p_i exceeds `margin`.
  bool is_interior(double margin) const;
  double min_probability() const { return p_.minCoeff(); }

 private:
  Preparation(RVector p, RVector phi, std::vector<bool> degenerate)
      : p_(std::move(p)), phi_(std::move(phi)), degenerate_(std::move(degenerate)) {}

  RVector p_;
  RVector phi_;
  std::vector<bool> degenerate_;
};

// A normalized vector of complex amplitudes.
class StateVector {
 public:
  static StateVector make(CVector amplitudes, double tol = 1e-12);
  // Normalizes `amplitudes` first; rejects the zero vector.
  static StateVector normalized(const CVector& amplitudes);

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const CVector& amplitudes() const { return amplitudes_; }

 private:
  explicit StateVector(CVector a) : amplitudes_(std::move(a)) {}
  CVector amplitudes_;
};

// A Hermitian matrix defining a scalar dynamical variable.
class HermitianObservable {
 public:
  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  const std::string& label() const { return label_; }
  bool is_diagonal(double tol = 0.0) const;

 private:
  friend HermitianObservable validate_hermitian(const CMatrix&, std::string, double);
  HermitianObservable(CMatrix m, std::string label)
      : entries_(std::move(m)), label_(std::move(label)) {}

  CMatrix entries_;
  std::string label_;
};

// psi_i = sqrt(p_i) e^{i phi_i} inverted. Components with |psi_i|^2 below
// `validation_tol` get phase 0 and the degenerate flag.
Preparation from_state_vector(const StateVector& psi, double validation_tol = 1e-12);

StateVector to_state_vector(const Preparation& prep);

// Raw amplitude evaluation without the normalization check; accepts any
// positive p (used by ambient-coordinate derivatives).
CVector amplitudes(const RVector& p, const RVector& phi);

// Rejects matrices that are not square or deviate from their conjugate
// transpose by more than `tol` in any entry (the deviation is reported).
HermitianObservable validate_hermitian(const CMatrix& m, std::string label = {},
                                       double tol = 1e-12);

// Convenience constructors.
HermitianObservable diagonal_observable(const RVector& energies, std::string label = {});

void require_same_dimension(int a, int b, const char* what);

}  // namespace prepspace
