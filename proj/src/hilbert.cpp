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

#include "prepspace/hilbert.hpp"

#include <cmath>

namespace prepspace::hilbert {

CMatrix hermitian_function(const CMatrix& a, const std::function<Complex(double)>& f) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalAbort("eigendecomposition failed");
  const RVector& lambda = es.eigenvalues();
  CVector diag(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) diag[i] = f(lambda[i]);
  return es.eigenvectors() * diag.asDiagonal() * es.eigenvectors().adjoint();
}

CVector schrodinger_propagate(const CMatrix& h, const CVector& psi0, double t) {
  const CMatrix u =
      hermitian_function(h, [t](double e) { return std::polar(1.0, -e * t); });
  return u * psi0;
}

CMatrix von_neumann_propagate(const CMatrix& h, const CMatrix& rho0, double t) {
  const CMatrix u =
      hermitian_function(h, [t](double e) { return std::polar(1.0, -e * t); });
  return u * rho0 * u.adjoint();
}

Complex expectation(const CMatrix& a, const CVector& psi) { return psi.dot(a * psi); }

double commutator_expectation(const CMatrix& f, const CMatrix& h, const CVector& psi) {
  const CMatrix comm = f * h - h * f;
  return (expectation(comm, psi) / Complex(0.0, 1.0)).real();
}

double fidelity(const CVector& a, const CVector& b) { return std::abs(a.dot(b)); }

}  // namespace prepspace::hilbert
