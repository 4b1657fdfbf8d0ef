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

#ifndef GKPQKD_SECURITY_HPP_
#define GKPQKD_SECURITY_HPP_

// Global CM before Bell detection, conditioning on the relay outcome, and the
// reverse-reconciliation key rate.
//
// Mode order of the global CM is (a, b, A', B'); the matrix carries the
// explicit 1/2 prefactor with vacuum entries 1 inside. Conditional states
// returned by ConditionOnBell are in plain shot-noise units (vacuum 1), the
// convention the entropy function expects.

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gkpqkd/channels.hpp"
#include "gkpqkd/errors.hpp"
#include "gkpqkd/gaussian_core.hpp"
#include "gkpqkd/units.hpp"

namespace gkpqkd {

// Effective channel from Alice to the relay: transmittance and additive
// Gaussian noise (vacuum-1/2 units) on top of the loss.
struct AliceLink {
  double tau = 1.0;
  NoiseVariance added_noise{0.0};

  // Unamplified pure-loss fiber.
  static AliceLink PureLoss(double tau_A) {
    internal::Require(tau_A > 0.0 && tau_A <= 1.0, "tau_A must lie in (0, 1]");
    return {tau_A, NoiseVariance(0.0)};
  }
  // Loss undone by amplification and GKP correction down to sigma_r2.
  static AliceLink Corrected(NoiseVariance sigma_r2) {
    internal::Require(sigma_r2.value >= 0.0, "residual variance must be >= 0");
    return {1.0, sigma_r2};
  }
  // Pre-amplified link without correction.
  static AliceLink PreampOnly(double tau_A, double n_bar = 0.0) {
    return {1.0, AwgnVariancePreamp(tau_A, n_bar)};
  }
};

inline Eigen::Matrix2d PauliZ2() { return Eigen::Vector2d(1.0, -1.0).asDiagonal(); }

// Global CM of both users and the relay inputs, 8x8, with the 1/2 prefactor.
inline CovMatrix AssembleGlobalCm(const ProtocolParams& p, const AliceLink& link) {
  p.Validate();
  const double sa = p.sigma2_A;
  const double sb = p.sigma2_B;
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(8, 8);
  v.block<2, 2>(0, 0) = (sa + 1.0) * id;
  v.block<2, 2>(2, 2) = (sb + 1.0) * id;
  v.block<2, 2>(4, 4) = (link.tau * sa + 1.0 + 2.0 * link.added_noise.value) * id;
  v.block<2, 2>(6, 6) = (p.tau_B * sb + 1.0) * id;
  const Eigen::Matrix2d c1 = std::sqrt(link.tau * (sa * sa + 2.0 * sa)) * PauliZ2();
  const Eigen::Matrix2d c2 = std::sqrt(p.tau_B * (sb * sb + 2.0 * sb)) * PauliZ2();
  v.block<2, 2>(0, 4) = c1;
  v.block<2, 2>(4, 0) = c1.transpose();
  v.block<2, 2>(2, 6) = c2;
  v.block<2, 2>(6, 2) = c2.transpose();
  return CovMatrix(0.5 * v);
}

inline CovMatrix AssembleGlobalCm(const ProtocolParams& p, NoiseVariance sigma_r2) {
  return AssembleGlobalCm(p, AliceLink::Corrected(sigma_r2));
}

// theta = (V_A' + V_B') / 2 in SNU, i.e. the sum of the A' and B' diagonal
// entries of the prefactored global CM.
inline double ThetaValue(const ProtocolParams& p, const AliceLink& link) {
  p.Validate();
  return 0.5 * (link.tau * p.sigma2_A + 2.0 * link.added_noise.value + p.tau_B * p.sigma2_B + 2.0);
}

inline double ThetaValue(const ProtocolParams& p, NoiseVariance sigma_r2) {
  return ThetaValue(p, AliceLink::Corrected(sigma_r2));
}

// Pre-amplification only: (sigma_A^2 - 2 tau_A + tau_B sigma_B^2 + 4) / 2.
inline double ThetaValuePreampOnly(const ProtocolParams& p) {
  p.Validate();
  return 0.5 * (p.sigma2_A - 2.0 * p.tau_A + p.tau_B * p.sigma2_B + 4.0);
}

struct ConditionedState {
  CovMatrix V;  // 4x4, modes (a, b), vacuum 1
  double theta = 0.0;
};

// Bell-like measurement on (A', B'):
//   V_ab|g = V_ab - 1/(2 det Theta) sum_ij C_i (X_i^T Theta X_j) C_j^T
// with Theta = diag(theta/2, theta/2). Applied to the prefactored global CM
// this yields half the conditional CM; the result is rescaled to vacuum 1.
inline ConditionedState ConditionOnBell(const CovMatrix& global, double theta) {
  internal::Require(global.dim() == 8, "Bell conditioning needs the 8x8 global CM");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw SingularMatrix("Theta is singular");
  const Eigen::MatrixXd& g = global.matrix();
  const Eigen::Matrix4d v_ab = g.topLeftCorner<4, 4>();
  const Eigen::Matrix<double, 4, 2> c[2] = {g.block<4, 2>(0, 4), g.block<4, 2>(0, 6)};
  Eigen::Matrix2d x[2];
  x[0] << 0, 1, 1, 0;
  x[1] << 0, 1, -1, 0;
  const Eigen::Matrix2d big_theta = 0.5 * theta * Eigen::Matrix2d::Identity();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      sum += c[i] * (x[i].transpose() * big_theta * x[j]) * c[j].transpose();
    }
  }
  Eigen::Matrix4d out = v_ab - sum / (2.0 * big_theta.determinant());
  out = (out + out.transpose()).eval();  // symmetrise and rescale by 2
  return {CovMatrix(Eigen::MatrixXd(out)), theta};
}

// Conditional CM straight from the closed-form entries.
inline ConditionedState ConditionedStateFor(const ProtocolParams& p, const AliceLink& link) {
  return ConditionOnBell(AssembleGlobalCm(p, link), ThetaValue(p, link));
}

// Heterodyne of mode a, then the 2x2 CM left on b.
inline Eigen::Matrix2d ConditionBOnA(const CovMatrix& v) {
  internal::Require(v.dim() == 4, "expected a two-mode CM");
  return SchurCondition(v.matrix().topLeftCorner(2, 2), v.matrix().bottomRightCorner(2, 2),
                        v.matrix().topRightCorner(2, 2));
}

inline double MutualInformation(const CovMatrix& v) {
  const Eigen::Matrix2d vb = v.matrix().bottomRightCorner<2, 2>();
  const Eigen::Matrix2d vba = ConditionBOnA(v);
  const double num = 1.0 + vb.determinant() + vb.trace();
  const double den = 1.0 + vba.determinant() + vba.trace();
  if (!(num > 0.0) || !(den > 0.0)) {
    throw UnphysicalState("non-positive argument in the mutual information");
  }
  return 0.5 * std::log2(num / den);
}

inline double MutualInformation(const ConditionedState& s) { return MutualInformation(s.V); }

enum class SpectrumMethod { kClosedForm, kGeneric };

struct Spectrum {
  double v1 = 1.0;
  double v2 = 1.0;
  double v3 = 1.0;
};

inline Spectrum ConditionalSpectrum(const CovMatrix& v,
                                    SpectrumMethod method = SpectrumMethod::kClosedForm) {
  Spectrum s;
  if (method == SpectrumMethod::kClosedForm) {
    std::tie(s.v1, s.v2) = TwoModeSymplecticEigenvalues(v);
    const double det = ConditionBOnA(v).determinant();
    if (!(det > 0.0)) throw UnphysicalState("conditional CM of b is not positive-definite");
    s.v3 = std::sqrt(det);
  } else {
    const std::vector<double> e = SymplecticEigenvalues(v);
    s.v1 = e[0];
    s.v2 = e[1];
    s.v3 = SymplecticEigenvalues(CovMatrix(Eigen::MatrixXd(ConditionBOnA(v))))[0];
  }
  return s;
}

struct HolevoResult {
  double chi = 0.0;
  Spectrum spectrum;
  bool clamped = false;  // raw value was negative and was clamped to 0
};

inline HolevoResult HolevoBound(const CovMatrix& v,
                                SpectrumMethod method = SpectrumMethod::kClosedForm) {
  HolevoResult r;
  r.spectrum = ConditionalSpectrum(v, method);
  const double raw = HFunction(r.spectrum.v1) + HFunction(r.spectrum.v2) - HFunction(r.spectrum.v3);
  r.clamped = raw < 0.0;
  r.chi = std::max(raw, 0.0);
  return r;
}

inline HolevoResult HolevoBound(const ConditionedState& s,
                                SpectrumMethod method = SpectrumMethod::kClosedForm) {
  return HolevoBound(s.V, method);
}

struct RateReport {
  double mutual_info = 0.0;
  double holevo = 0.0;
  double rate = 0.0;
  Spectrum spectrum;
  bool holevo_clamped = false;
};

// beta0 I - chi on an arbitrary conditional CM.
inline RateReport RateFromCm(const CovMatrix& v, double beta0) {
  RateReport out;
  out.mutual_info = MutualInformation(v);
  const HolevoResult h = HolevoBound(v);
  out.holevo = h.chi;
  out.spectrum = h.spectrum;
  out.holevo_clamped = h.clamped;
  out.rate = beta0 * out.mutual_info - out.holevo;
  return out;
}

inline RateReport AsymptoticRate(const ProtocolParams& p, const AliceLink& link) {
  return RateFromCm(ConditionedStateFor(p, link).V, p.beta0);
}

inline RateReport AsymptoticRate(const ProtocolParams& p, NoiseVariance sigma_r2) {
  return AsymptoticRate(p, AliceLink::Corrected(sigma_r2));
}

struct CoherentInfo {
  double ci = 0.0;
  double rci = 0.0;
};

// I_CI = S(b) - S(ab), I_RCI = S(a) - S(ab).
inline CoherentInfo CiRci(const ConditionedState& s) {
  const auto [v1, v2] = TwoModeSymplecticEigenvalues(s.V);
  const double s_ab = HFunction(v1) + HFunction(v2);
  const double va = std::sqrt(s.V.Block(0, 0).determinant());
  const double vb = std::sqrt(s.V.Block(1, 1).determinant());
  return {HFunction(vb) - s_ab, HFunction(va) - s_ab};
}

}  // namespace gkpqkd

#endif  // GKPQKD_SECURITY_HPP_
