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

#ifndef GKPQKD_FINITE_SIZE_HPP_
#define GKPQKD_FINITE_SIZE_HPP_

// Worst-case parameter estimation and the composable finite-size key rate.

#include <cmath>

#include <Eigen/Dense>

#include "gkpqkd/errors.hpp"
#include "gkpqkd/gaussian_core.hpp"
#include "gkpqkd/security.hpp"

namespace gkpqkd {

struct FiniteSizeParams {
  double N = 1e8;
  double m_pe = 1e7;
  int d = 32;
  double p_ec = 0.9;
  double eps_cor = 1e-10;
  double eps_s = 1e-10;
  double eps_h = 1e-10;
  double eps_pe = 1e-10;

  // Reference defaults with m_pe = N / 10.
  static FiniteSizeParams WithBlockSize(double n) {
    FiniteSizeParams fs;
    fs.N = n;
    fs.m_pe = 0.1 * n;
    return fs;
  }

  void Validate() const {
    internal::Require(m_pe > 0.0 && m_pe < N, "need 0 < m_pe < N");
    internal::Require(d >= 2 && (d & (d - 1)) == 0, "d must be a power of two >= 2");
    internal::Require(p_ec >= 0.0 && p_ec <= 1.0, "p_ec must lie in [0, 1]");
    for (double e : {eps_cor, eps_s, eps_h, eps_pe}) {
      internal::Require(e > 0.0 && e < 1.0, "epsilon parameters must lie in (0, 1)");
    }
  }
};

// Solves 4 exp(-kappa) = eps_pe.
inline double KappaFromEps(double eps_pe) {
  internal::Require(eps_pe > 0.0 && eps_pe < 1.0, "eps_pe must lie in (0, 1)");
  return std::log(4.0 / eps_pe);
}

struct WorstCaseCm {
  CovMatrix V_wc;
  double kappa = 0.0;
  bool physical = true;
};

inline constexpr double kMinPeSamples = 1e4;

// Replaces <q_a q_b> and <p_a p_b> by their worst-case values
//   <q_a q_b>_wc = 1/4 [(mu_q+ - mu_q-) - 2 sqrt(kappa/m)(mu_q+ + mu_q-)]
//   <p_a p_b>_wc = 1/4 [(mu_p+ - mu_p-) + 2 sqrt(kappa/m)(mu_p+ + mu_p-)]
// where mu_x+- = Var(x_a +- x_b). Local variances are left unchanged.
inline WorstCaseCm ComputeWorstCaseCm(const CovMatrix& v, double m_pe, double eps_pe) {
  internal::Require(v.dim() == 4, "worst-case CM needs a two-mode CM");
  internal::Require(m_pe >= kMinPeSamples, "m_pe must be >= 1e4");
  const double kappa = KappaFromEps(eps_pe);
  const double e = 2.0 * std::sqrt(kappa / m_pe);
  Eigen::MatrixXd w = v.matrix();
  for (int quad = 0; quad < 2; ++quad) {
    const double va = v(quad, quad);
    const double vb = v(2 + quad, 2 + quad);
    const double c = v(quad, 2 + quad);
    const double mu_plus = va + vb + 2.0 * c;
    const double mu_minus = va + vb - 2.0 * c;
    const double sign = quad == 0 ? -1.0 : 1.0;
    w(quad, 2 + quad) = w(2 + quad, quad) =
        0.25 * ((mu_plus - mu_minus) + sign * e * (mu_plus + mu_minus));
  }
  CovMatrix v_wc(std::move(w));
  const bool physical = v_wc.IsPhysical();
  return {std::move(v_wc), kappa, physical};
}

inline WorstCaseCm ComputeWorstCaseCm(const CovMatrix& v, const FiniteSizeParams& fs) {
  fs.Validate();
  return ComputeWorstCaseCm(v, fs.m_pe, fs.eps_pe);
}

// 4 log2(sqrt(d) + 2) sqrt(log2(2 / eps_s^2)).
inline double AepDelta(int d, double eps_s) {
  internal::Require(d >= 2, "d must be >= 2");
  internal::Require(eps_s > 0.0 && eps_s <= 1.0, "eps_s must lie in (0, 1]");
  return 4.0 * std::log2(std::sqrt(static_cast<double>(d)) + 2.0) *
         std::sqrt(std::log2(2.0 / (eps_s * eps_s)));
}

struct ComposableReport {
  double rate = 0.0;
  RateReport pe;  // beta0 I - chi on the worst-case CM
  RateReport nominal;
};

// p_ec [l R_pe - sqrt(l) Delta_aep + log2(eps_h^2 eps_cor)] / N, l = N - m_pe.
inline ComposableReport ComposableRateFromCm(const CovMatrix& v, double beta0,
                                             const FiniteSizeParams& fs) {
  fs.Validate();
  const WorstCaseCm wc = ComputeWorstCaseCm(v, fs);
  if (!wc.physical) throw UnphysicalState("worst-case CM is unphysical");
  ComposableReport out;
  out.nominal = RateFromCm(v, beta0);
  out.pe = RateFromCm(wc.V_wc, beta0);
  const double l = fs.N - fs.m_pe;
  out.rate = fs.p_ec *
             (l * out.pe.rate - std::sqrt(l) * AepDelta(fs.d, fs.eps_s) +
              std::log2(fs.eps_h * fs.eps_h * fs.eps_cor)) /
             fs.N;
  return out;
}

inline ComposableReport ComposableRate(const ProtocolParams& p, const AliceLink& link,
                                       const FiniteSizeParams& fs) {
  return ComposableRateFromCm(ConditionedStateFor(p, link).V, p.beta0, fs);
}

inline ComposableReport ComposableRate(const ProtocolParams& p, NoiseVariance sigma_r2,
                                       const FiniteSizeParams& fs) {
  return ComposableRate(p, AliceLink::Corrected(sigma_r2), fs);
}

inline double EpsilonTotal(const FiniteSizeParams& fs) {
  return fs.eps_cor + fs.eps_s + fs.eps_h + fs.p_ec * fs.eps_pe;
}

}  // namespace gkpqkd

#endif  // GKPQKD_FINITE_SIZE_HPP_
