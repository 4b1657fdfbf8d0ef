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

#ifndef GKPQKD_CHANNELS_HPP_
#define GKPQKD_CHANNELS_HPP_

// Fiber transmittance and the additive-noise variances obtained when loss is
// compensated by pre-amplification or by teleportation.

#include <cmath>
#include <limits>

#include "gkpqkd/errors.hpp"
#include "gkpqkd/units.hpp"

namespace gkpqkd {

inline constexpr double kFiberAttenuationDbPerKm = 0.2;

// Protocol parameters; variances in SNU, lengths in km.
struct ProtocolParams {
  double sigma2_A = 20.0;
  double sigma2_B = 20.0;
  double L_A = 0.0;
  double L_B = 0.0;
  double tau_A = 1.0;
  double tau_B = 1.0;
  double n_bar = 0.0;
  double beta0 = 1.0;
  double alpha0 = kFiberAttenuationDbPerKm;
  double lambda_nm = 1550.0;

  void Validate() const {
    internal::Require(sigma2_A >= 0.0 && sigma2_B >= 0.0, "modulation variances must be >= 0");
    internal::Require(L_A >= 0.0 && L_B >= 0.0, "link lengths must be >= 0");
    internal::Require(tau_A > 0.0 && tau_A <= 1.0, "tau_A must lie in (0, 1]");
    internal::Require(tau_B > 0.0 && tau_B <= 1.0, "tau_B must lie in (0, 1]");
    internal::Require(n_bar >= 0.0, "n_bar must be >= 0");
    internal::Require(beta0 > 0.0 && beta0 <= 1.0, "beta0 must lie in (0, 1]");
    internal::Require(alpha0 >= 0.0, "alpha0 must be >= 0");
  }
};

inline double FiberTransmittance(double length_km,
                                 double alpha0 = kFiberAttenuationDbPerKm) {
  internal::Require(length_km >= 0.0, "fiber length must be >= 0");
  internal::Require(alpha0 >= 0.0, "attenuation must be >= 0");
  return std::pow(10.0, -alpha0 * length_km / 10.0);
}

// Loss tau_A preceded by a phase-insensitive amplifier of gain 1/tau_A.
inline NoiseVariance AwgnVariancePreamp(double tau_A, double n_bar = 0.0) {
  internal::Require(tau_A > 0.0 && tau_A <= 1.0, "tau_A must lie in (0, 1]");
  internal::Require(n_bar >= 0.0, "n_bar must be >= 0");
  return NoiseVariance(n_bar + 1.0 - tau_A);
}

// Teleportation through a TMSV resource of s0 dB over a link of tau_A.
inline NoiseVariance AwgnVarianceQt(double tau_A, double s0_db) {
  internal::Require(tau_A > 0.0 && tau_A <= 1.0, "tau_A must lie in (0, 1]");
  internal::Require(s0_db >= 0.0, "TMSV squeezing must be >= 0 dB");
  const double st = std::sqrt(tau_A);
  return NoiseVariance(st * std::pow(10.0, -s0_db / 10.0) + 1.0 - st);
}

// Repeaterless capacity -log2(1 - tau).
inline double PlobBound(double tau) {
  internal::Require(tau >= 0.0 && tau < 1.0, "PLOB bound needs tau in [0, 1)");
  return -std::log1p(-tau) / std::log(2.0);
}

}  // namespace gkpqkd

#endif  // GKPQKD_CHANNELS_HPP_
