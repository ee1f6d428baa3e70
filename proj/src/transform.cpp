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

#include "prepspace/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace prepspace {

namespace {

constexpr double kConstraintTol = 1e-8;

}  // namespace

double FrameConstraintResiduals::max() const {
  return std::max({unitarity, parametrization, weight_sums, cross_terms});
}

FrameConstraintResiduals constraint_residuals(const CMatrix& u, const RMatrix& omega,
                                              const RMatrix& beta) {
  const auto n = u.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  FrameConstraintResiduals r;
  r.unitarity = std::max((u.adjoint() * u - id).cwiseAbs().maxCoeff(),
                         (u * u.adjoint() - id).cwiseAbs().maxCoeff());

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex param = std::polar(std::sqrt(omega(i, j)), beta(i, j));
      r.parametrization = std::max(r.parametrization, std::abs(u(j, i) - param));
    }

  for (Eigen::Index j = 0; j < n; ++j) {
    r.weight_sums = std::max(r.weight_sums, std::abs(omega.col(j).sum() - 1.0));
    r.weight_sums = std::max(r.weight_sums, std::abs(omega.row(j).sum() - 1.0));
  }

  // For j != k:
  //   sum_i sqrt(w_ij w_ik) {cos, sin}(b_ik - b_ij) = 0
  //   sum_i sqrt(w_ji w_ki) {cos, sin}(b_ki - b_ji) = 0
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k) {
      if (j == k) continue;
      double c1 = 0, s1 = 0, c2 = 0, s2 = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double a = std::sqrt(omega(i, j) * omega(i, k));
        c1 += a * std::cos(beta(i, k) - beta(i, j));
        s1 += a * std::sin(beta(i, k) - beta(i, j));
        const double b = std::sqrt(omega(j, i) * omega(k, i));
        c2 += b * std::cos(beta(k, i) - beta(j, i));
        s2 += b * std::sin(beta(k, i) - beta(j, i));
      }
      r.cross_terms = std::max({r.cross_terms, std::abs(c1), std::abs(s1), std::abs(c2),
                                std::abs(s2)});
    }
  return r;
}

UnitaryFrameMap frame_from_unitary(const CMatrix& u, double unitarity_tol) {
  if (u.rows() != u.cols() || u.rows() < 2) {
    throw ValidationError("frame matrix must be square with dimension >= 2");
  }
  if (!u.allFinite()) throw ValidationError("frame matrix must be finite");
  const auto n = u.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  const double dev = std::max((u.adjoint() * u - id).cwiseAbs().maxCoeff(),
                              (u * u.adjoint() - id).cwiseAbs().maxCoeff());
  if (dev > unitarity_tol) {
    std::ostringstream os;
    os << "matrix is not unitary: max |u^dagger u - I| = " << dev;
    throw ValidationError(os.str());
  }

  RMatrix omega(n, n), beta(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Complex uji = u(j, i);
      omega(i, j) = std::norm(uji);
      beta(i, j) = uji == Complex(0.0, 0.0) ? 0.0 : wrap_phase(std::arg(uji));
    }

  const FrameConstraintResiduals r = constraint_residuals(u, omega, beta);
  if (r.parametrization > unitarity_tol || r.weight_sums > kConstraintTol ||
      r.cross_terms > kConstraintTol) {
    std::ostringstream os;
    os << "frame parameters violate their constraints (param " << r.parametrization
       << ", sums " << r.weight_sums << ", cross " << r.cross_terms << ")";
    throw InconsistencyError(os.str());
  }
  return UnitaryFrameMap(u, std::move(omega), std::move(beta), r);
}

UnitaryFrameMap compose(const UnitaryFrameMap& first, const UnitaryFrameMap& second) {
  require_same_dimension(first.dim(), second.dim(), "compose");
  // psi'' = u2^dagger u1^dagger psi = (u1 u2)^dagger psi
  return frame_from_unitary(first.u() * second.u());
}

UnitaryFrameMap permutation_frame(const std::vector<int>& perm) {
  const auto n = static_cast<Eigen::Index>(perm.size());
  CMatrix u = CMatrix::Zero(n, n);
  // psi'_i = psi_{perm[i]} requires u_{perm[i], i} = 1.
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = perm[static_cast<size_t>(i)];
    if (j < 0 || j >= n) throw ValidationError("permutation index out of range");
    u(j, i) = 1.0;
  }
  return frame_from_unitary(u);
}

std::pair<RVector, RVector> apply_ambient(const UnitaryFrameMap& frame, const RVector& p,
                                          const RVector& phi) {
  const auto n = p.size();
  const RMatrix& w = frame.omega();
  const RMatrix& b = frame.beta();
  RVector p_out(n), phi_out(n);
  RVector amp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) amp[j] = std::sqrt(w(i, j) * std::max(p[j], 0.0));
    double pi = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        pi += amp[j] * amp[k] * std::cos(phi[j] - phi[k] - b(i, j) + b(i, k));
    double num = 0.0, den = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      num += amp[j] * std::sin(phi[j] - b(i, j));
      den += amp[j] * std::cos(phi[j] - b(i, j));
    }
    p_out[i] = pi;
    phi_out[i] = wrap_phase(std::atan2(num, den));
  }
  return {std::move(p_out), std::move(phi_out)};
}

Preparation apply(const UnitaryFrameMap& frame, const Preparation& prep, double validation_tol) {
  require_same_dimension(frame.dim(), prep.dim(), "apply");
  auto [p, phi] = apply_ambient(frame, prep.p(), prep.phi());
  return Preparation::make(std::move(p), std::move(phi), validation_tol, 1e-10);
}

RMatrix symplectic_form(int n) {
  RMatrix j = RMatrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = RMatrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -RMatrix::Identity(n, n);
  return j;
}

JacobianMatrix numeric_jacobian(const PhaseSpaceMap& map, const RVector& p, const RVector& phi,
                                double step) {
  const auto n = p.size();
  JacobianMatrix jac{RMatrix(2 * n, 2 * n)};
  for (Eigen::Index col = 0; col < 2 * n; ++col) {
    RVector p_plus = p, p_minus = p, phi_plus = phi, phi_minus = phi;
    if (col < n) {
      p_plus[col] += step;
      p_minus[col] -= step;
    } else {
      phi_plus[col - n] += step;
      phi_minus[col - n] -= step;
    }
    const auto [pp, fp] = map(p_plus, phi_plus);
    const auto [pm, fm] = map(p_minus, phi_minus);
    for (Eigen::Index row = 0; row < n; ++row) {
      jac.m(row, col) = (pp[row] - pm[row]) / (2.0 * step);
      jac.m(n + row, col) = wrap_phase_difference(fp[row] - fm[row]) / (2.0 * step);
    }
  }
  return jac;
}

JacobianMatrix numeric_jacobian(const UnitaryFrameMap& frame, const Preparation& prep,
                                double step) {
  require_same_dimension(frame.dim(), prep.dim(), "numeric_jacobian");
  if (!(step >= 1e-7 && step <= 1e-4)) {
    throw ValidationError("finite-difference step must lie in [1e-7, 1e-4]");
  }
  if (!prep.is_interior(2.0 * step)) {
    throw SingularChartError("Jacobian requested too close to the simplex boundary");
  }
  const auto [image_p, image_phi] = apply_ambient(frame, prep.p(), prep.phi());
  if (image_p.minCoeff() <= 2.0 * step) {
    throw SingularChartError("image of the preparation lies near the simplex boundary");
  }
  return numeric_jacobian(
      [&frame](const RVector& p, const RVector& phi) { return apply_ambient(frame, p, phi); },
      prep.p(), prep.phi(), step);
}

double symplectic_defect(const JacobianMatrix& jac) {
  const RMatrix j = symplectic_form(jac.dim());
  return (jac.m * j * jac.m.transpose() - j).cwiseAbs().maxCoeff();
}

double constrained_symplectic_defect(const JacobianMatrix& jac) {
  const int n = jac.dim();
  // Basis of {sum dp = 0}: e_{p_i} - e_{p_{n-1}} for i < n-1, then every e_{phi_i}.
  RMatrix basis = RMatrix::Zero(2 * n, 2 * n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    basis(i, i) = 1.0;
    basis(n - 1, i) = -1.0;
  }
  for (int i = 0; i < n; ++i) basis(n + i, n - 1 + i) = 1.0;
  const RMatrix j = symplectic_form(n);
  const RMatrix pulled = basis.transpose() * jac.m.transpose() * j * jac.m * basis;
  const RMatrix original = basis.transpose() * j * basis;
  return (pulled - original).cwiseAbs().maxCoeff();
}

double symplectic_defect(const UnitaryFrameMap& frame, const Preparation& prep, double step) {
  return symplectic_defect(numeric_jacobian(frame, prep, step));
}

SymplecticReport symplectic_report(const UnitaryFrameMap& frame, const Preparation& prep,
                                   double step) {
  const JacobianMatrix jac = numeric_jacobian(frame, prep, step);
  return {symplectic_defect(jac), constrained_symplectic_defect(jac), jac.determinant()};
}

}  // namespace prepspace
