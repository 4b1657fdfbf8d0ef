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

#include "gkpqkd/security.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gkpqkd/gkp_codec.hpp"
#include "gkpqkd/mc_oracle.hpp"
#include "test_util.hpp"

namespace gkpqkd {
namespace {

// Classical Gaussian conditioning on the two relay outcomes
// q_- = (q_A' - q_B') / sqrt2 and p_+ = (p_A' + p_B') / sqrt2, done on the
// vacuum-1 global CM.
Eigen::Matrix4d HomodyneOracle(const CovMatrix& global_half) {
  const Eigen::MatrixXd g = 2.0 * global_half.matrix();
  Eigen::Matrix<double, 2, 8> m = Eigen::Matrix<double, 2, 8>::Zero();
  m(0, 4) = 1.0 / std::sqrt(2.0);
  m(0, 6) = -1.0 / std::sqrt(2.0);
  m(1, 5) = 1.0 / std::sqrt(2.0);
  m(1, 7) = 1.0 / std::sqrt(2.0);
  const Eigen::Matrix2d var = m * g * m.transpose();
  const Eigen::Matrix<double, 4, 2> cov = g.topRows(4) * m.transpose();
  return g.topLeftCorner(4, 4) - cov * var.inverse() * cov.transpose();
}

ProtocolParams Table1() { return ProtocolParams{}; }

TEST(GlobalCm, HandValues) {
  const CovMatrix g = AssembleGlobalCm(Table1(), NoiseVariance(0.0));
  EXPECT_EQ(g.dim(), 8);
  EXPECT_NEAR(g(0, 0), 10.5, 1e-15);
  EXPECT_NEAR(g(4, 4), 10.5, 1e-15);
  EXPECT_NEAR(g(0, 4), 0.5 * std::sqrt(440.0), 1e-14);
  EXPECT_NEAR(g(1, 5), -0.5 * std::sqrt(440.0), 1e-14);
  EXPECT_NEAR(g(0, 2), 0.0, 0.0);
  EXPECT_TRUE(g.IsPhysical(0.5));
}

TEST(Theta, Values) {
  EXPECT_NEAR(ThetaValue(Table1(), NoiseVariance(0.0)), 21.0, 1e-15);
  ProtocolParams p = Table1();
  p.tau_A = 1.0;
  EXPECT_NEAR(ThetaValuePreampOnly(p), 21.0, 1e-15);
  p.tau_B = 0.1;
  // (20 + 2 * 0.05 + 0.1 * 20 + 2) / 2
  EXPECT_NEAR(ThetaValue(p, NoiseVariance(0.05)), 12.05, 1e-12);
  EXPECT_NEAR(ThetaValue(p, AliceLink::PureLoss(0.5)), 0.5 * (10.0 + 2.0 + 2.0), 1e-12);
}

TEST(ConditionOnBell, HandValuesAtUnitTransmittance) {
  const ConditionedState s = ConditionedStateFor(Table1(), AliceLink::Corrected(NoiseVariance(0.0)));
  const double theta = 21.0;
  EXPECT_NEAR(s.theta, theta, 1e-15);
  EXPECT_NEAR(s.V(0, 0), 21.0 - 440.0 / 42.0, 1e-12);
  EXPECT_NEAR(s.V(2, 2), 21.0 - 440.0 / 42.0, 1e-12);
  EXPECT_NEAR(s.V(0, 2), 440.0 / 42.0, 1e-12);
  EXPECT_NEAR(s.V(1, 3), -440.0 / 42.0, 1e-12);
  EXPECT_NEAR(s.V(0, 1), 0.0, 1e-15);
}

TEST(ConditionOnBell, MatchesHomodyneConditioning) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ut(0.01, 1.0), us(0.0, 0.5), um(1.0, 40.0);
  for (int i = 0; i < 100; ++i) {
    ProtocolParams p;
    p.sigma2_A = um(rng);
    p.sigma2_B = um(rng);
    p.tau_B = ut(rng);
    const AliceLink link{ut(rng), NoiseVariance(us(rng))};
    const CovMatrix global = AssembleGlobalCm(p, link);
    const ConditionedState s = ConditionedStateFor(p, link);
    const Eigen::Matrix4d oracle = HomodyneOracle(global);
    EXPECT_LT((s.V.matrix() - oracle).cwiseAbs().maxCoeff(), 1e-9 * oracle.cwiseAbs().maxCoeff());
    EXPECT_TRUE(s.V.IsPhysical());
  }
}

TEST(ConditionOnBell, SingularThetaThrows) {
  const CovMatrix g = AssembleGlobalCm(Table1(), NoiseVariance(0.0));
  EXPECT_THROW(ConditionOnBell(g, 0.0), SingularMatrix);
  EXPECT_THROW(ConditionOnBell(g, -1.0), SingularMatrix);
}

TEST(MutualInformation, ClosedFormAtUnitTransmittance) {
  const ConditionedState s = ConditionedStateFor(Table1(), AliceLink::Corrected(NoiseVariance(0.0)));
  // Both quadratures: V_b|a = V_b - c^2 / (V_a + 1).
  const double va = s.V(0, 0), vb = s.V(2, 2), c = s.V(0, 2);
  const double cond = vb - c * c / (va + 1.0);
  const double want = 0.5 * std::log2((1.0 + vb) * (1.0 + vb) / ((1.0 + cond) * (1.0 + cond)));
  EXPECT_NEAR(MutualInformation(s), want, 1e-12);
}

TEST(MutualInformation, NonNegativeOnRandomDraws) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ut(0.001, 1.0), us(0.0, 2.0), um(0.1, 60.0);
  for (int i = 0; i < 300; ++i) {
    ProtocolParams p;
    p.sigma2_A = um(rng);
    p.sigma2_B = um(rng);
    p.tau_B = ut(rng);
    const ConditionedState s = ConditionedStateFor(p, AliceLink{ut(rng), NoiseVariance(us(rng))});
    EXPECT_GE(MutualInformation(s), 0.0);
  }
}

TEST(MutualInformation, MatchesPrepareAndMeasureSimulation) {
  ProtocolParams p = Table1();
  p.tau_B = FiberTransmittance(5.0);
  for (const AliceLink& link : {AliceLink::PureLoss(FiberTransmittance(1.0)),
                                AliceLink::Corrected(NoiseVariance(0.05))}) {
    const double analytic = MutualInformation(ConditionedStateFor(p, link));
    const McMutualInfoResult mc = McProtocolMutualInfo(p, link, 1000000, {17, 1});
    EXPECT_NEAR(mc.mutual_info, analytic, 0.01 * analytic);
    EXPECT_NEAR(mc.mutual_info, analytic, 4.0 * mc.stderr_ + 1e-12);
  }
}

TEST(Holevo, ClosedFormMatchesGenericSpectrum) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ut(0.01, 1.0), us(0.0, 1.0), um(1.0, 40.0);
  for (int i = 0; i < 200; ++i) {
    ProtocolParams p;
    p.sigma2_A = um(rng);
    p.sigma2_B = um(rng);
    p.tau_B = ut(rng);
    const ConditionedState s = ConditionedStateFor(p, AliceLink{ut(rng), NoiseVariance(us(rng))});
    const HolevoResult a = HolevoBound(s, SpectrumMethod::kClosedForm);
    const HolevoResult b = HolevoBound(s, SpectrumMethod::kGeneric);
    EXPECT_NEAR(a.chi, b.chi, 1e-8 * std::max(1.0, b.chi));
    EXPECT_NEAR(a.spectrum.v3, b.spectrum.v3, 1e-8 * b.spectrum.v3);
    const auto brute = testing::BruteForceSpectrum(s.V.matrix());
    EXPECT_NEAR(a.spectrum.v1, brute[0], 1e-7 * brute[0]);
    EXPECT_NEAR(a.spectrum.v2, brute[1], 1e-7 * brute[1]);
  }
}

TEST(Holevo, SpectrumIsPhysical) {
  const ConditionedState s = ConditionedStateFor(Table1(), AliceLink::PureLoss(FiberTransmittance(2.0)));
  const HolevoResult h = HolevoBound(s);
  EXPECT_GE(h.spectrum.v2, 1.0 - 1e-9);
  EXPECT_GE(h.spectrum.v3, 1.0 - 1e-9);
  EXPECT_GE(h.chi, 0.0);
}

TEST(Rate, DecreasesWithResidualNoise) {
  ProtocolParams p = Table1();
  p.tau_B = FiberTransmittance(5.0);
  double prev = INFINITY;
  for (double sr2 = 0.0; sr2 <= 0.3; sr2 += 0.01) {
    const double r = AsymptoticRate(p, NoiseVariance(sr2)).rate;
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(Rate, VanishingBobArmKillsTheKey) {
  ProtocolParams p = Table1();
  p.tau_B = 1e-6;
  EXPECT_LT(AsymptoticRate(p, AliceLink::PureLoss(FiberTransmittance(1.0))).rate, 0.0);
}

TEST(Rate, BetaScalesMutualInformation) {
  ProtocolParams p = Table1();
  p.tau_B = FiberTransmittance(3.0);
  const RateReport full = AsymptoticRate(p, NoiseVariance(0.02));
  p.beta0 = 0.95;
  const RateReport part = AsymptoticRate(p, NoiseVariance(0.02));
  EXPECT_NEAR(part.rate, 0.95 * full.mutual_info - full.holevo, 1e-12);
}

TEST(CoherentInfo, IdentityBetweenDirections) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ut(0.01, 1.0), us(0.0, 0.5);
  for (int i = 0; i < 100; ++i) {
    ProtocolParams p = Table1();
    p.tau_B = ut(rng);
    const ConditionedState s = ConditionedStateFor(p, AliceLink{ut(rng), NoiseVariance(us(rng))});
    const CoherentInfo c = CiRci(s);
    const double va = std::sqrt(s.V.Block(0, 0).determinant());
    const double vb = std::sqrt(s.V.Block(1, 1).determinant());
    EXPECT_NEAR(c.rci - c.ci, HFunction(va) - HFunction(vb), 1e-9);
  }
}

TEST(CoherentInfo, BoundedByMutualInformation) {
  ProtocolParams p = Table1();
  p.tau_B = FiberTransmittance(4.0);
  const ConditionedState s = ConditionedStateFor(p, AliceLink::PureLoss(FiberTransmittance(1.0)));
  const CoherentInfo c = CiRci(s);
  EXPECT_LE(c.ci, HFunction(std::sqrt(s.V.Block(1, 1).determinant())));
  EXPECT_LE(c.rci, HFunction(std::sqrt(s.V.Block(0, 0).determinant())));
}

}  // namespace
}  // namespace gkpqkd
