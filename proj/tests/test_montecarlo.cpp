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
#include <cstdlib>
#include <limits>

#include "oracles.hpp"
#include "prepspace/montecarlo.hpp"

using namespace prepspace;

TEST(MeasureSampler, Volume) {
  EXPECT_NEAR(MeasureSampler(2, 1).volume(), 4.0 * kPi * kPi, 1e-12);
  EXPECT_NEAR(MeasureSampler(3, 1).volume(), std::pow(kTwoPi, 3) / 2.0, 1e-10);
}

TEST(MeasureSampler, DrawsValidPreparations) {
  const MeasureSampler s(4, 5);
  Rng rng = s.chunk_rng(0);
  for (int k = 0; k < 1000; ++k) {
    const Preparation z = s.draw(rng);
    EXPECT_NEAR(z.p().sum(), 1.0, 1e-12);
    EXPECT_GE(z.p().minCoeff(), 0.0);
    EXPECT_GE(z.phi().minCoeff(), 0.0);
    EXPECT_LT(z.phi().maxCoeff(), kTwoPi);
  }
}

TEST(MeasureSampler, MarginalMatchesSpacingsOracle) {
  // The p_1 marginal of the uniform simplex is Beta(1, n-1); compare the
  // empirical second moments of both constructions.
  const int n = 3;
  const MeasureSampler s(n, 6);
  Rng rng = s.chunk_rng(0);
  std::mt19937_64 orng(99);
  std::vector<double> a, b;
  for (int k = 0; k < 20000; ++k) {
    a.push_back(std::pow(s.draw(rng).p()[0], 2));
    b.push_back(std::pow(oracle::simplex_by_spacings(n, orng)[0], 2));
  }
  const oracle::Stats sa = oracle::stats(a), sb = oracle::stats(b);
  // E[p^2] = 2 / (n (n+1)).
  EXPECT_NEAR(sa.mean, 1.0 / 6.0, 4.0 * sa.std_error);
  EXPECT_NEAR(sb.mean, 1.0 / 6.0, 4.0 * sb.std_error);
}

TEST(McIntegrate, ConstantGivesExactVolume) {
  const MeasureSampler s(3, 7);
  const McEstimate r = mc_integrate([](const Preparation&) { return 1.0; }, s, 5000);
  EXPECT_NEAR(r.estimate, s.volume(), 1e-12 * s.volume());
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_EQ(r.accepted, 5000u);
}

TEST(McIntegrate, LinearMoments) {
  for (int n = 2; n <= 4; ++n) {
    const MeasureSampler s(n, 8);
    const double exact = std::pow(kTwoPi, n) / oracle::factorial(n);
    for (int i = 0; i < n; ++i) {
      const McEstimate r = mc_integrate([i](const Preparation& z) { return z.p()[i]; }, s, 20000);
      EXPECT_NEAR(r.estimate, exact, 3.5 * r.std_error) << "n=" << n << " i=" << i;
    }
  }
}

TEST(McIntegrate, DiagonalExpectation) {
  const int n = 3;
  RVector f(3);
  f << 0.5, -1.0, 2.0;
  const MeasureSampler s(n, 9);
  const McEstimate r =
      mc_integrate([&](const Preparation& z) { return z.p().dot(f); }, s, 20000);
  EXPECT_NEAR(r.estimate, std::pow(kTwoPi, n) / oracle::factorial(n) * f.sum(),
              3.5 * r.std_error);
}

TEST(McIntegrate, SerialAndParallelAreBitIdentical) {
  const MeasureSampler s(3, 10, 1000);
  const Integrand g = [](const Preparation& z) {
    return std::cos(z.phi()[0] - z.phi()[1]) * z.p()[0] + z.p()[2] * z.p()[2];
  };
  const McEstimate a = mc_integrate(g, s, 10500, Execution::serial);
  const McEstimate b = mc_integrate(g, s, 10500, Execution::parallel);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);

  const VectorIntegrand gv = [](const Preparation& z, Eigen::Ref<RVector> out) {
    out = z.p();
  };
  const McVectorEstimate c = mc_integrate(gv, 3, s, 10500, Execution::serial);
  const McVectorEstimate d = mc_integrate(gv, 3, s, 10500, Execution::parallel);
  EXPECT_EQ(c.estimate, d.estimate);
  EXPECT_EQ(c.std_error, d.std_error);
}

TEST(McIntegrate, IndependentOfThreadCap) {
  const MeasureSampler s(2, 11, 512);
  const Integrand g = [](const Preparation& z) { return std::sin(z.phi()[1]) + z.p()[0]; };
  setenv("PREPSPACE_THREADS", "1", 1);
  EXPECT_EQ(sampling_threads(), 1);
  const McEstimate a = mc_integrate(g, s, 8000);
  setenv("PREPSPACE_THREADS", "3", 1);
  const McEstimate b = mc_integrate(g, s, 8000);
  unsetenv("PREPSPACE_THREADS");
  EXPECT_EQ(a.estimate, b.estimate);
}

TEST(McIntegrate, RejectsNonFiniteSamples) {
  const MeasureSampler s(2, 12);
  // About 0.05% rejected: tolerated and counted.
  const McEstimate ok = mc_integrate(
      [](const Preparation& z) {
        return z.p()[0] < 5e-4 ? std::numeric_limits<double>::quiet_NaN() : 1.0;
      },
      s, 20000);
  EXPECT_GT(ok.rejected, 0u);
  EXPECT_EQ(ok.accepted + ok.rejected, 20000u);
  // About 1% rejected: aborts.
  EXPECT_THROW(mc_integrate(
                   [](const Preparation& z) {
                     return z.p()[0] < 1e-2 ? std::numeric_limits<double>::infinity() : 1.0;
                   },
                   s, 20000),
               NumericalAbort);
}

TEST(McIntegrate, RequiresEnoughSamples) {
  EXPECT_THROW(mc_integrate([](const Preparation&) { return 1.0; }, MeasureSampler(2, 1), 999),
               ValidationError);
}
