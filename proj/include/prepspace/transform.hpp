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

#include <functional>
#include <utility>

#include "prepspace/core.hpp"

namespace prepspace {

// Residuals of the constraints a frame's (omega, beta) parameters satisfy.
struct FrameConstraintResiduals {
  double unitarity = 0.0;       // max |u^dagger u - I|, |u u^dagger - I|
  double parametrization = 0.0; // max |u_ji - sqrt(omega_ij) e^{i beta_ij}|
  double weight_sums = 0.0;     // max |sum_i omega_ij - 1|, |sum_i omega_ji - 1|
  double cross_terms = 0.0;     // max over j != k of the cos/sin cross sums

  double max() const;
};

// A change of measurement frame: psi'_i = sum_j conj(u_ji) psi_j, i.e.
// psi' = u^dagger psi. Also stored in the real parametrization
// u_ji = sqrt(omega_ij) e^{i beta_ij}.
class UnitaryFrameMap {
 public:
  int dim() const { return static_cast<int>(u_.rows()); }
  const CMatrix& u() const { return u_; }
  const RMatrix& omega() const { return omega_; }
  const RMatrix& beta() const { return beta_; }
  const FrameConstraintResiduals& residuals() const { return residuals_; }

 private:
  friend UnitaryFrameMap frame_from_unitary(const CMatrix&, double);
  UnitaryFrameMap(CMatrix u, RMatrix omega, RMatrix beta, FrameConstraintResiduals r)
      : u_(std::move(u)), omega_(std::move(omega)), beta_(std::move(beta)), residuals_(r) {}

  CMatrix u_;
  RMatrix omega_;
  RMatrix beta_;
  FrameConstraintResiduals residuals_;
};

// Builds a frame from a unitary matrix. Throws ValidationError when u is not
// unitary within `unitarity_tol`, InconsistencyError when the derived
// parameters miss their constraints by more than 1e-8.
UnitaryFrameMap frame_from_unitary(const CMatrix& u, double unitarity_tol = 1e-10);

// Evaluates every constraint on (omega, beta) directly from the parameters.
FrameConstraintResiduals constraint_residuals(const CMatrix& u, const RMatrix& omega,
                                              const RMatrix& beta);

// Frame applying `first`, then `second`.
UnitaryFrameMap compose(const UnitaryFrameMap& first, const UnitaryFrameMap& second);

UnitaryFrameMap permutation_frame(const std::vector<int>& perm);

// The transformation law in real coordinates. Valid for any nonnegative p
// (not only the simplex); phases come from atan2 and are reduced to [0, 2pi).
std::pair<RVector, RVector> apply_ambient(const UnitaryFrameMap& frame, const RVector& p,
                                          const RVector& phi);

Preparation apply(const UnitaryFrameMap& frame, const Preparation& prep,
                  double validation_tol = 1e-12);

// Any map of ambient coordinates (p, phi) -> (p', phi').
using PhaseSpaceMap = std::function<std::pair<RVector, RVector>(const RVector&, const RVector&)>;

// 2n x 2n Jacobian in the block layout
//   [ dp'/dp    dp'/dphi   ]
//   [ dphi'/dp  dphi'/dphi ].
struct JacobianMatrix {
  RMatrix m;

  int dim() const { return static_cast<int>(m.rows() / 2); }
  double determinant() const { return m.determinant(); }
};

// The constant form J = [0 I; -I 0].
RMatrix symplectic_form(int n);

// Central-difference Jacobian of `map` at (p, phi), each coordinate perturbed
// on its own. Phase differences are unwrapped to (-pi, pi].
JacobianMatrix numeric_jacobian(const PhaseSpaceMap& map, const RVector& p, const RVector& phi,
                                double step);

// Jacobian of `apply` at an interior preparation. `step` must lie in [1e-7, 1e-4].
JacobianMatrix numeric_jacobian(const UnitaryFrameMap& frame, const Preparation& prep,
                                double step = 1e-5);

// max |M J M^T - J|.
double symplectic_defect(const JacobianMatrix& jac);

// Defect restricted to the tangent space of sum(p) = 1: the pullback of the
// symplectic form by M, compared with the form itself, on a basis of vectors
// with sum(dp) = 0.
double constrained_symplectic_defect(const JacobianMatrix& jac);

double symplectic_defect(const UnitaryFrameMap& frame, const Preparation& prep,
                         double step = 1e-5);

struct SymplecticReport {
  double ambient_defect = 0.0;
  double constrained_defect = 0.0;
  double determinant = 0.0;
};

SymplecticReport symplectic_report(const UnitaryFrameMap& frame, const Preparation& prep,
                                   double step = 1e-5);

}  // namespace prepspace
