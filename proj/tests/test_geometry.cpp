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
#include "prepspace/geometry.hpp"
#include "prepspace/random.hpp"

using namespace prepspace;

namespace {

Preparation half_half() {
  RVector p(2), phi(2);
  p << 0.5, 0.5;
  phi << 0.0, 0.0;
  return Preparation::make(p, phi);
}

TangentDisplacement random_displacement(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RVector dp(n), dphi(n);
  for (int i = 0; i < n; ++i) {
    dp[i] = u(rng);
    dphi[i] = u(rng);
  }
  dp.array() -= dp.mean();
  return TangentDisplacement::make(dp, dphi);
}

}  // namespace

TEST(TangentDisplacement, MustStayOnSimplex) {
  RVector dp(2), dphi(2);
  dp << 0.1, 0.1;
  dphi << 0.0, 0.0;
  EXPECT_THROW(TangentDisplacement::make(dp, dphi), ValidationError);
}

TEST(LineElement, NullDisplacement) {
  EXPECT_EQ(line_element_squared(half_half(), TangentDisplacement::zero(2)), 0.0);
}

TEST(LineElement, GlobalPhaseDirectionIsNull) {
  for (double alpha : {1e-3, 0.7, 3.0}) {
    RVector dp = RVector::Zero(2), dphi = RVector::Constant(2, alpha);
    EXPECT_NEAR(line_element_squared(half_half(), TangentDisplacement::make(dp, dphi)), 0.0,
                1e-15);
  }
}

TEST(LineElement, ProbabilityDirection) {
  // dp = (e, -e): 2 * e^2 / (4 * 1/2) = e^2.
  const double e = 1e-3;
  RVector dp(2), dphi = RVector::Zero(2);
  dp << e, -e;
  EXPECT_NEAR(line_element_squared(half_half(), TangentDisplacement::make(dp, dphi)), 1e-6, 1e-20);
}

TEST(LineElement, SingularOnBoundary) {
  RVector p(2), phi = RVector::Zero(2);
  p << 1.0, 0.0;
  EXPECT_THROW(line_element_squared(Preparation::make(p, phi), TangentDisplacement::zero(2)),
               SingularChartError);
}

TEST(LineElement, NonNegativeEverywhere) {
  Rng rng = make_rng(41);
  for (int k = 0; k < 2000; ++k) {
    const int n = 2 + k % 5;
    const Preparation prep = random_interior_preparation(n, rng, 1e-4);
    EXPECT_GE(line_element_squared(prep, random_displacement(n, rng)), 0.0);
  }
}

TEST(HilbertAngle, Examples) {
  CVector a(2), b(2);
  a << 1.0, 0.0;
  b << 0.0, 1.0;
  const StateVector sa = StateVector::make(a), sb = StateVector::make(b);
  EXPECT_EQ(hilbert_angle(sa, sa), 0.0);
  EXPECT_NEAR(hilbert_angle(sa, sb), kPi / 2.0, 1e-15);

  Rng rng = make_rng(42);
  const CVector psi = random_state(3, rng);
  for (double alpha : {0.3, 2.0, -1.0}) {
    const CVector rotated = psi * std::polar(1.0, alpha);
    EXPECT_NEAR(hilbert_angle(StateVector::make(psi), StateVector::make(rotated)), 0.0, 1e-15);
  }
}

TEST(HilbertAngle, AgreesWithArccosAwayFromZero) {
  Rng rng = make_rng(43);
  for (int k = 0; k < 200; ++k) {
    const CVector a = random_state(4, rng), b = random_state(4, rng);
    const double expected = std::acos(std::min(1.0, std::abs(a.dot(b))));
    EXPECT_NEAR(hilbert_angle(StateVector::make(a), StateVector::make(b)), expected, 1e-12);
  }
}

TEST(MetricVsAngle, NullDisplacement) {
  Rng rng = make_rng(44);
  const MetricAngleReport r =
      verify_metric_matches_angle(random_interior_preparation(2, rng), TangentDisplacement::zero(2),
                                  1e-3);
  EXPECT_EQ(r.coarse.abs_difference, 0.0);
  EXPECT_TRUE(r.passed);
}

TEST(MetricVsAngle, GlobalPhaseDirection) {
  Rng rng = make_rng(45);
  const Preparation prep = random_interior_preparation(3, rng);
  const TangentDisplacement d = TangentDisplacement::make(RVector::Zero(3), RVector::Ones(3));
  const MetricAngleReport r = verify_metric_matches_angle(prep, d, 1e-3);
  EXPECT_LT(r.coarse.angle_squared, 1e-12);
  EXPECT_LT(r.coarse.line_element, 1e-12);
  EXPECT_TRUE(r.passed);
}

TEST(MetricVsAngle, RemainderIsCubic) {
  // With ds^2 taken at the start of the displacement the remainder is
  // c3 s^3 + c4 s^4, so halving s shrinks difference / s^2 by 2 + O(s).
  Rng rng = make_rng(46);
  for (int k = 0; k < 300; ++k) {
    const int n = 2 + k % 3;
    const Preparation prep = random_interior_preparation(n, rng);
    const MetricAngleReport r = verify_metric_matches_angle(prep, random_displacement(n, rng), 1e-4);
    EXPECT_NEAR(r.reduction, 2.0, 0.05);
  }
}

TEST(MetricVsAngle, MidpointMetricLeavesQuarticRemainder) {
  // Evaluating ds^2 at the midpoint of the segment removes the s^3 term.
  Rng rng = make_rng(47);
  auto ratio = [](const Preparation& prep, const TangentDisplacement& d, double s) {
    const Preparation end = displaced(prep, d.scaled(s));
    const Preparation mid = displaced(prep, d.scaled(s / 2.0));
    const double angle = hilbert_angle(to_state_vector(prep), to_state_vector(end));
    return std::abs(angle * angle - line_element_squared(mid, d.scaled(s))) / (s * s);
  };
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 3;
    const Preparation prep = random_interior_preparation(n, rng);
    const TangentDisplacement d = random_displacement(n, rng);
    EXPECT_GT(ratio(prep, d, 1e-3) / ratio(prep, d, 5e-4), 3.5);
  }
}

TEST(MetricVsAngle, WrongMetricIsDetected) {
  // Dropping the (sum p dphi)^2 term leaves an O(s^2) mismatch: no reduction.
  Rng rng = make_rng(48);
  const Preparation prep = random_interior_preparation(3, rng);
  const TangentDisplacement d = random_displacement(3, rng);
  auto ratio = [&](double s) {
    const TangentDisplacement ds = d.scaled(s);
    const double angle =
        hilbert_angle(to_state_vector(prep), to_state_vector(displaced(prep, ds)));
    const double pd = prep.p().dot(ds.dphi());
    return std::abs(angle * angle - (line_element_squared(prep, ds) + pd * pd)) / (s * s);
  };
  EXPECT_LT(ratio(1e-3) / ratio(5e-4), 1.01);
}

TEST(FrameInvariance, IdentityAndPermutation) {
  Rng rng = make_rng(49);
  const Preparation prep = random_interior_preparation(3, rng);
  const TangentDisplacement d = random_displacement(3, rng);
  const FrameInvarianceReport id =
      verify_metric_frame_invariance(prep, d, frame_from_unitary(CMatrix::Identity(3, 3)));
  EXPECT_LT(id.relative_deviation, 1e-9);
  const FrameInvarianceReport pm =
      verify_metric_frame_invariance(prep, d, permutation_frame({2, 1, 0}));
  EXPECT_LT(pm.relative_deviation, 1e-9);
}

TEST(FrameInvariance, HaarFrames) {
  Rng rng = make_rng(50);
  int evaluated = 0;
  while (evaluated < 100) {
    const Preparation prep = random_interior_preparation(3, rng);
    const UnitaryFrameMap frame = frame_from_unitary(haar_unitary(3, rng));
    if (!apply(frame, prep).is_interior(1e-3)) continue;
    const FrameInvarianceReport r =
        verify_metric_frame_invariance(prep, random_displacement(3, rng), frame);
    EXPECT_LT(r.relative_deviation, 1e-6);
    ++evaluated;
  }
}
