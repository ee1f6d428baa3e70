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

#include "prepspace/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace prepspace {

void ToleranceConfig::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"validation_tol", validation_tol}, {"gradient_fd_step", gradient_fd_step},
      {"ode_step", ode_step},             {"mc_rel_tol", mc_rel_tol},
      {"root_tol", root_tol}};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ValidationError(std::string("tolerance '") + name + "' must be positive");
    }
  }
}

double wrap_phase(double angle) {
  double r = std::fmod(angle, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative number can round up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_phase_difference(double delta) {
  double r = wrap_phase(delta);
  return r > kPi ? r - kTwoPi : r;
}

Preparation Preparation::make(RVector p, RVector phi, double validation_tol, double sum_tol) {
  const auto n = p.size();
  if (n < 2) throw ValidationError("preparation dimension must be at least 2");
  if (phi.size() != n) {
    throw ValidationError("probability and phase vectors differ in length");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(p[i]) || !std::isfinite(phi[i])) {
      throw ValidationError("preparation coordinates must be finite");
    }
    if (p[i] < 0.0) {
      if (p[i] < -sum_tol) {
        std::ostringstream os;
        os << "negative probability p[" << i << "] = " << p[i];
        throw ValidationError(os.str());
      }
      p[i] = 0.0;
    }
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > sum_tol) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << total << ", not 1";
    throw ValidationError(os.str());
  }
  std::vector<bool> degenerate(static_cast<size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (p[i] < validation_tol) {
      degenerate[static_cast<size_t>(i)] = true;
      phi[i] = 0.0;
    } else {
      phi[i] = wrap_phase(phi[i]);
    }
  }
  return Preparation(std::move(p), std::move(phi), std::move(degenerate));
}

bool Preparation::has_degenerate_phase() const {
  return std::any_of(degenerate_.begin(), degenerate_.end(), [](bool b) { return b; });
}

bool Preparation::is_interior(double margin) const { return p_.minCoeff() > margin; }

StateVector StateVector::make(CVector amplitudes, double tol) {
  if (amplitudes.size() < 2) throw ValidationError("state dimension must be at least 2");
  if (!amplitudes.allFinite()) throw ValidationError("state amplitudes must be finite");
  const double norm2 = amplitudes.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << "state vector not normalized: sum |psi_i|^2 = " << norm2;
    throw ValidationError(os.str());
  }
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::normalized(const CVector& amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("cannot normalize a zero or non-finite vector");
  }
  return make(amplitudes / norm, 1e-12);
}

bool HermitianObservable::is_diagonal(double tol) const {
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = 0; j < entries_.cols(); ++j)
      if (i != j && std::abs(entries_(i, j)) > tol) return false;
  return true;
}

Preparation from_state_vector(const StateVector& psi, double validation_tol) {
  const CVector& a = psi.amplitudes();
  const auto n = a.size();
  RVector p(n), phi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = std::norm(a[i]);
    phi[i] = std::arg(a[i]);
  }
  // Re-normalize away the last-bit drift of |psi|^2 so the simplex check holds.
  p /= p.sum();
  return Preparation::make(std::move(p), std::move(phi), validation_tol);
}

CVector amplitudes(const RVector& p, const RVector& phi) {
  CVector psi(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    psi[i] = std::polar(std::sqrt(std::max(p[i], 0.0)), phi[i]);
  }
  return psi;
}

StateVector to_state_vector(const Preparation& prep) {
  return StateVector::make(amplitudes(prep.p(), prep.phi()), 1e-12);
}

HermitianObservable validate_hermitian(const CMatrix& m, std::string label, double tol) {
  if (m.rows() != m.cols()) throw ValidationError("observable matrix must be square");
  if (m.rows() < 2) throw ValidationError("observable dimension must be at least 2");
  if (!m.allFinite()) throw ValidationError("observable entries must be finite");
  const double deviation = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (deviation > tol) {
    std::ostringstream os;
    os << "matrix is not Hermitian: max |m - m^dagger| = " << deviation;
    throw ValidationError(os.str());
  }
  return HermitianObservable(m, std::move(label));
}

HermitianObservable diagonal_observable(const RVector& energies, std::string label) {
  return validate_hermitian(energies.cast<Complex>().asDiagonal().toDenseMatrix(),
                            std::move(label));
}

void require_same_dimension(int a, int b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << "dimension mismatch in " << what << ": " << a << " vs " << b;
    throw ValidationError(os.str());
  }
}

}  // namespace prepspace
