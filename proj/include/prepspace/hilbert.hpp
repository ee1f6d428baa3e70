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

#include "prepspace/core.hpp"

// Standard Hilbert-space formulation: state vectors, operators and their
// time evolution. Used as the reference the canonical coordinates are checked
// against, and by the CLI for fidelity reports.
namespace prepspace::hilbert {

// f(A) = V f(Lambda) V^dagger for Hermitian A.
CMatrix hermitian_function(const CMatrix& a, const std::function<Complex(double)>& f);

// exp(-i H t) psi0.
CVector schrodinger_propagate(const CMatrix& h, const CVector& psi0, double t);

// exp(-i H t) rho0 exp(i H t).
CMatrix von_neumann_propagate(const CMatrix& h, const CMatrix& rho0, double t);

// <psi|A|psi>
Complex expectation(const CMatrix& a, const CVector& psi);

// (1/i) <psi|[F, H]|psi>, real for Hermitian F and H.
double commutator_expectation(const CMatrix& f, const CMatrix& h, const CVector& psi);

// |<a|b>| for normalized a, b.
double fidelity(const CVector& a, const CVector& b);

}  // namespace prepspace::hilbert
