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

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "prepspace/random.hpp"
#include "prepspace/transform.hpp"

using namespace prepspace;

namespace {

CMatrix hadamard() {
  CMatrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  return h / std::sqrt(2.0);
}

}  // namespace

TEST(FrameFromUnitary, Identity) {
  const UnitaryFrameMap f = frame_from_unitary(CMatrix::Identity(3, 3));
  EXPECT_EQ(f.omega(), RMatrix(RMatrix::Identity(3, 3)));
  EXPECT_EQ(f.beta(), RMatrix(RMatrix::Zero(3, 3)));
  EXPECT_LT(f.residuals().max(), 1e-15);
}

TEST(FrameFromUnitary, Hadamard) {
  const UnitaryFrameMap f = frame_from_unitary(hadamard());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(f.omega()(i, j), 0.5, 1e-15);
  // Only u_22 = -1/sqrt(2) carries a phase.
  EXPECT_NEAR(f.beta()(1, 1), kPi, 1e-15);
  EXPECT_NEAR(f.beta()(0, 0) + f.beta()(0, 1) + f.beta()(1, 0), 0.0, 1e-15);
  // Cross sums: (1/2) cos(0) + (1/2) cos(pi) = 0.
  EXPECT_LT(f.residuals().cross_terms, 1e-15);
  EXPECT_LT(f.residuals().weight_sums, 1e-15);
}

TEST(FrameFromUnitary, RejectsNonUnitary) {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 0.1;
  EXPECT_THROW(frame_from_unitary(m), ValidationError);
  EXPECT_THROW(frame_from_unitary(CMatrix::Identity(2, 3)), ValidationError);
}

TEST(FrameFromUnitary, HaarConstraintsHold) {
  Rng rng = make_rng(21);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const UnitaryFrameMap f = frame_from_unitary(haar_unitary(4, rng));
    // Recompute the weight and cross sums from u alone.
    const FrameConstraintResiduals r = constraint_residuals(f.u(), f.omega(), f.beta());
    worst = std::max(worst, r.max());
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Apply, IdentityLeavesPreparationUnchanged) {
  Rng rng = make_rng(22);
  const Preparation prep = random_interior_preparation(4, rng);
  const Preparation out = apply(frame_from_unitary(CMatrix::Identity(4, 4)), prep);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(out.p()[i], prep.p()[i], 1e-15);
    EXPECT_NEAR(oracle::angle_diff(out.phi()[i], prep.phi()[i]), 0.0, 1e-14);
  }
}

TEST(Apply, PermutationRelabels) {
  Rng rng = make_rng(23);
  const Preparation prep = random_interior_preparation(3, rng);
  const std::vector<int> perm{2, 0, 1};
  const Preparation out = apply(permutation_frame(perm), prep);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(out.p()[i], prep.p()[perm[static_cast<size_t>(i)]], 1e-15);
    EXPECT_NEAR(oracle::angle_diff(out.phi()[i], prep.phi()[perm[static_cast<size_t>(i)]]), 0.0,
                1e-14);
  }
}

TEST(Apply, MatchesComplexOracle) {
  Rng rng = make_rng(24);
  for (int k = 0; k < 1000; ++k) {
    const int n = 2 + k % 3;
    const UnitaryFrameMap f = frame_from_unitary(haar_unitary(n, rng));
    const Preparation prep = random_interior_preparation(n, rng, 0.0);
    const Preparation out = apply(f, prep);
    // psi'_i = sum_j conj(u_ji) psi_j
    const oracle::CVector psi = f.u().adjoint() * oracle::psi_of(prep.p(), prep.phi());
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(out.p()[i], std::norm(psi[i]), 1e-10);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (std::norm(psi[i]) < 1e-6 || std::norm(psi[j]) < 1e-6) continue;
        const double expected = std::arg(psi[i] * std::conj(psi[j]));
        EXPECT_NEAR(oracle::angle_diff(out.phi()[i] - out.phi()[j], expected), 0.0, 1e-8);
      }
    EXPECT_NEAR(out.p().sum(), 1.0, 1e-10);
  }
}

TEST(Apply, ComposesLikeMatrixProduct) {
  Rng rng = make_rng(25);
  for (int k = 0; k < 200; ++k) {
    const int n = 2 + k % 4;
    const UnitaryFrameMap f1 = frame_from_unitary(haar_unitary(n, rng));
    const UnitaryFrameMap f2 = frame_from_unitary(haar_unitary(n, rng));
    const Preparation prep = random_interior_preparation(n, rng);
    const Preparation twice = apply(f2, apply(f1, prep));
    const Preparation once = apply(compose(f1, f2), prep);
    const oracle::CVector a = oracle::psi_of(twice.p(), twice.phi());
    const oracle::CVector b = oracle::psi_of(once.p(), once.phi());
    EXPECT_NEAR(std::abs(a.dot(b)), 1.0, 1e-9);
    EXPECT_LT((twice.p() - once.p()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Apply, DegenerateImageIsFlaggedNotRejected) {
  // Hadamard maps (1/2, 1/2) with equal phases onto the first basis vector.
  RVector p(2), phi(2);
  p << 0.5, 0.5;
  phi << 0.0, 0.0;
  const Preparation out = apply(frame_from_unitary(hadamard()), Preparation::make(p, phi));
  EXPECT_NEAR(out.p()[0], 1.0, 1e-15);
  EXPECT_TRUE(out.degenerate()[1]);
}

TEST(NumericJacobian, IdentityAndPermutation) {
  Rng rng = make_rng(26);
  const Preparation prep = random_interior_preparation(3, rng);
  const JacobianMatrix id = numeric_jacobian(frame_from_unitary(CMatrix::Identity(3, 3)), prep);
  EXPECT_LT((id.m - RMatrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-9);

  const std::vector<int> perm{1, 2, 0};
  const JacobianMatrix pm = numeric_jacobian(permutation_frame(perm), prep);
  RMatrix expected = RMatrix::Zero(6, 6);
  for (int i = 0; i < 3; ++i) {
    expected(i, perm[static_cast<size_t>(i)]) = 1.0;
    expected(3 + i, 3 + perm[static_cast<size_t>(i)]) = 1.0;
  }
  EXPECT_LT((pm.m - expected).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(NumericJacobian, SecondOrderSelfConvergence) {
  Rng rng = make_rng(27);
  const UnitaryFrameMap f = frame_from_unitary(haar_unitary(3, rng));
  const Preparation prep = random_interior_preparation(3, rng, 0.1);
  const RMatrix j1 = numeric_jacobian(f, prep, 8e-5).m;
  const RMatrix j2 = numeric_jacobian(f, prep, 4e-5).m;
  const RMatrix j3 = numeric_jacobian(f, prep, 2e-5).m;
  // Richardson limit from the two finest steps of a second-order scheme.
  const RMatrix limit = (4.0 * j3 - j2) / 3.0;
  const double e1 = (j1 - limit).cwiseAbs().maxCoeff();
  const double e2 = (j2 - limit).cwiseAbs().maxCoeff();
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(NumericJacobian, RejectsBadStepAndBoundary) {
  Rng rng = make_rng(28);
  const UnitaryFrameMap f = frame_from_unitary(haar_unitary(2, rng));
  const Preparation prep = random_interior_preparation(2, rng);
  EXPECT_THROW(numeric_jacobian(f, prep, 1e-3), ValidationError);
  EXPECT_THROW(numeric_jacobian(f, prep, 1e-9), ValidationError);
  RVector p(2), phi(2);
  p << 1.0, 0.0;
  phi << 0.0, 0.0;
  EXPECT_THROW(numeric_jacobian(f, Preparation::make(p, phi), 1e-5), SingularChartError);
}

TEST(SymplecticDefect, IdentityIsZero) {
  Rng rng = make_rng(29);
  const Preparation prep = random_interior_preparation(3, rng);
  EXPECT_LT(symplectic_defect(frame_from_unitary(CMatrix::Identity(3, 3)), prep), 1e-10);
}

TEST(SymplecticDefect, RandomFramesAreCanonical) {
  Rng rng = make_rng(30);
  double worst = 0.0, worst_constrained = 0.0, worst_det = 0.0;
  int evaluated = 0;
  while (evaluated < 200) {
    const UnitaryFrameMap f = frame_from_unitary(haar_unitary(3, rng));
    const Preparation prep = random_interior_preparation(3, rng);
    if (!apply(f, prep).is_interior(1e-2)) continue;
    const SymplecticReport r = symplectic_report(f, prep, 1e-5);
    worst = std::max(worst, r.ambient_defect);
    worst_constrained = std::max(worst_constrained, r.constrained_defect);
    worst_det = std::max(worst_det, std::abs(std::abs(r.determinant) - 1.0));
    ++evaluated;
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_LT(worst_constrained, 1e-6);
  EXPECT_LT(worst_det, 1e-6);
}

TEST(SymplecticDefect, DetectsNonCanonicalMap) {
  // p' = p, phi' = 2 phi: M = diag(I, 2I), M J M^T = 2J.
  const PhaseSpaceMap doubling = [](const RVector& p, const RVector& phi) {
    return std::make_pair(RVector(p), RVector(2.0 * phi));
  };
  Rng rng = make_rng(31);
  const Preparation prep = random_interior_preparation(3, rng);
  // Keep 2 phi away from the wrap point.
  RVector phi = RVector::Constant(3, 0.4);
  const double defect = symplectic_defect(numeric_jacobian(doubling, prep.p(), phi, 1e-5));
  EXPECT_NEAR(defect, 1.0, 1e-8);
}
