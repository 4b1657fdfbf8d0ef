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

#ifndef GKPQKD_UNITS_HPP_
#define GKPQKD_UNITS_HPP_

// Two variance conventions coexist in this library:
//
//   * Channel and GKP noise variances (sigma^2, sigma_r^2, Delta^2) use
//     hbar = 1, where the vacuum has quadrature variance 1/2.
//   * Covariance matrices fed to entropies use shot-noise units (SNU), where
//     the vacuum has variance 1.
//
// Values crossing a module boundary carry a tag so the factor of two is
// applied exactly once.

namespace gkpqkd {

template <class Tag>
struct Variance {
  double value = 0.0;

  constexpr Variance() = default;
  constexpr explicit Variance(double v) : value(v) {}

  friend constexpr bool operator==(Variance, Variance) = default;
  friend constexpr auto operator<=>(Variance a, Variance b) {
    return a.value <=> b.value;
  }
};

struct HalfVacuumTag {};
struct ShotNoiseTag {};

// Vacuum variance 1/2.
using NoiseVariance = Variance<HalfVacuumTag>;
// Vacuum variance 1.
using SnuVariance = Variance<ShotNoiseTag>;

constexpr SnuVariance ToSnu(NoiseVariance v) { return SnuVariance(2.0 * v.value); }
constexpr NoiseVariance ToHalfVacuum(SnuVariance v) {
  return NoiseVariance(0.5 * v.value);
}

}  // namespace gkpqkd

#endif  // GKPQKD_UNITS_HPP_
