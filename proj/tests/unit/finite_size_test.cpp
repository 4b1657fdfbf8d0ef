// Copyright 2026 The gkpqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gkpqkd/finite_size.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "gkpqkd/channels.hpp"
#include "gkpqkd/security.hpp"

namespace gkpqkd {
namespace {

CovMatrix HandCm() {
  Eigen::MatrixXd v(4, 4);
  v << 5.0, 0.0, 3.0, 0.0,
       0.0, 5.0, 0.0, -3.0,
       3.0, 0.0, 4.0, 0.0,
       0.0, -3.0, 0.0, 4.0;
  return CovMatrix(v);
}

ConditionedState FiberState(double l_a, double l_b) {
  ProtocolParams p;
  p.tau_B = FiberTransmittance(l_b);
  return ConditionedStateFor(p, AliceLink::PureLoss(FiberTransmittance(l_a)));
}

TEST(Kappa, Value) {
  EXPECT_NEAR(KappaFromEps(1e-10), std::log(4e10), 1e-12);
  EXPECT_NEAR(KappaFromEps(1e-10), 24.4122, 1e-4);
  EXPECT_THROW(KappaFromEps(0.0), InvalidArgument);
}

TEST(AepDelta, Value) {
  EXPECT_NEAR(AepDelta(32, 1e-10), 96.47, 0.01);
  EXPECT_NEAR(AepDelta(32, 1.0), 4.0 * std::log2(std::sqrt(32.0) + 2.0), 1e-12);
  EXPECT_THROW(AepDelta(32, 0.0), InvalidArgument);
}

TEST(EpsilonTotal, Value) {
  EXPECT_NEAR(EpsilonTotal(FiniteSizeParams{}), 3.9e-10, 1e-22);
}

TEST(FiniteSizeParams, Validation) {
  FiniteSizeParams fs;
  EXPECT_NO_THROW(fs.Validate());
  fs.p_ec = 1.2;
  EXPECT_THROW(fs.Validate(), InvalidArgument);
  fs = FiniteSizeParams{};
  fs.d = 33;
  EXPECT_THROW(fs.Validate(), InvalidArgument);
  fs = FiniteSizeParams{};
  fs.m_pe = fs.N;
  EXPECT_THROW(fs.Validate(), InvalidArgument);
  EXPECT_EQ(FiniteSizeParams::WithBlockSize(2e9).m_pe, 2e8);
}

TEST(WorstCase, ShiftsCorrelationsByTailBound) {
  const double m = 1e6, eps = 1e-10;
  const WorstCaseCm wc = ComputeWorstCaseCm(HandCm(), m, eps);
  const double shift = std::sqrt(std::log(4.0 / eps) / m) * 9.0;
  EXPECT_NEAR(wc.V_wc(0, 2), 3.0 - shift, 1e-12);
  EXPECT_NEAR(wc.V_wc(2, 0), 3.0 - shift, 1e-12);
  EXPECT_NEAR(wc.V_wc(1, 3), -3.0 + shift, 1e-12);
  EXPECT_EQ(wc.V_wc(0, 0), 5.0);
  EXPECT_EQ(wc.V_wc(3, 3), 4.0);
  EXPECT_TRUE(wc.physical);
}

TEST(WorstCase, TooFewSamplesRejected) {
  EXPECT_THROW(ComputeWorstCaseCm(HandCm(), 100.0, 1e-10), InvalidArgument);
}

TEST(WorstCase, NeverRaisesMutualInformation) {
  for (double m : {1e4, 1e6, 1e8, 1e10}) {
    const ConditionedState s = FiberState(1.0, 3.0);
    const WorstCaseCm wc = ComputeWorstCaseCm(s.V, m, 1e-10);
    EXPECT_LE(MutualInformation(wc.V_wc), MutualInformation(s.V));
  }
}

TEST(ComposableRate, BelowAsymptoticAndIncreasingInN) {
  const ConditionedState s = FiberState(1.0, 5.0);
  const double asym = RateFromCm(s.V, 1.0).rate;
  double prev = -INFINITY;
  for (double n : {1e8, 3e8, 1e9, 3e9, 1e10, 1e11, 1e12}) {
    const ComposableReport r = ComposableRateFromCm(s.V, 1.0, FiniteSizeParams::WithBlockSize(n));
    EXPECT_GT(r.rate, prev) << n;
    EXPECT_LT(r.rate, asym);
    EXPECT_NEAR(r.nominal.rate, asym, 1e-15);
    prev = r.rate;
  }
}

TEST(ComposableRate, LargeBlockLimit) {
  const ConditionedState s = FiberState(1.0, 5.0);
  const double asym = RateFromCm(s.V, 1.0).rate;
  const FiniteSizeParams fs = FiniteSizeParams::WithBlockSize(1e18);
  const double want = fs.p_ec * (1.0 - 0.1) * asym;
  // The tail shift still moves the rate at the 1e-5 level here.
  EXPECT_NEAR(ComposableRateFromCm(s.V, 1.0, fs).rate, want, 1e-4 * std::abs(want));
}

TEST(ComposableRate, LeakagePenaltyMatchesHand) {
  const ConditionedState s = FiberState(1.0, 5.0);
  FiniteSizeParams fs;
  const ComposableReport r = ComposableRateFromCm(s.V, 1.0, fs);
  const double l = fs.N - fs.m_pe;
  const double aep = 4.0 * std::log2(std::sqrt(32.0) + 2.0) * std::sqrt(std::log2(2e20));
  const double want = fs.p_ec * (l * r.pe.rate - std::sqrt(l) * aep + std::log2(1e-30)) / fs.N;
  EXPECT_NEAR(r.rate, want, 1e-12);
}

TEST(ComposableRate, UnphysicalWorstCaseThrows) {
  // Near-pure correlations leave no room for the tail shift at small m_pe.
  Eigen::MatrixXd v(4, 4);
  const double a = 1.0 + 1e-6;
  const double c = std::sqrt(a * a - 1.0);
  v << a, 0, c, 0, 0, a, 0, -c, c, 0, a, 0, 0, -c, 0, a;
  FiniteSizeParams fs = FiniteSizeParams::WithBlockSize(1e5);
  EXPECT_THROW(ComposableRateFromCm(CovMatrix(v), 1.0, fs), UnphysicalState);
}

}  // namespace
}  // namespace gkpqkd
