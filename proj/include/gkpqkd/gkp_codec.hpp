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

#ifndef GKPQKD_GKP_CODEC_HPP_
#define GKPQKD_GKP_CODEC_HPP_

// GKP-TMS oscillator-to-oscillator code on the square lattice.
//
// Noise variances here use vacuum 1/2. Per quadrature the decoder sees the
// data noise z_d and the ancilla homodyne value w (a component of Omega z_a),
// plus, for a finite-energy ancilla, Gaussian syndrome noise. The syndrome is
// s = R(w + n) and the output is z_d - g s. Its variance follows from two
// wrapped-Gaussian moments of Y = w + n ~ N(0, v):
//
//   Var(z_d) - 2 g (c / v) E[Y R(Y)] + g^2 E[R(Y)^2],   c = Cov(z_d, w).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gkpqkd/channels.hpp"
#include "gkpqkd/errors.hpp"
#include "gkpqkd/gaussian_core.hpp"
#include "gkpqkd/numerics.hpp"
#include "gkpqkd/units.hpp"

namespace gkpqkd {

// Square-lattice spacing sqrt(2 pi).
inline const double kLatticeSpacing = std::sqrt(2.0 * std::numbers::pi);
inline const double kSyndromeHalfWidth = 0.5 * kLatticeSpacing;
inline constexpr double kMaxTmsSqueezing = 3.0;

class GkpAncilla {
 public:
  static GkpAncilla Ideal() { return GkpAncilla(std::nullopt); }
  static GkpAncilla Finite(double s_db) {
    internal::Require(s_db > 0.0 && std::isfinite(s_db), "GKP squeezing must be positive dB");
    return GkpAncilla(s_db);
  }

  bool ideal() const { return !s_db_.has_value(); }
  double squeezing_db() const { return s_db_.value_or(INFINITY); }

  // Delta^2 = 10^{-s/10} / 2.
  double Delta2() const { return ideal() ? 0.0 : 0.5 * std::pow(10.0, -*s_db_ / 10.0); }

  // Variance of the Gaussian noise on the pre-wrap syndrome: 2 Delta^2.
  double SyndromeNoiseVariance() const { return 2.0 * Delta2(); }

 private:
  explicit GkpAncilla(std::optional<double> s_db) : s_db_(s_db) {}
  std::optional<double> s_db_;
};

struct GkpCodeConfig {
  double r = 0.0;
  GkpAncilla ancilla = GkpAncilla::Ideal();
};

// x - n(x) sqrt(2 pi), n(x) the nearest integer with ties away from zero.
inline double SyndromeReduce(double x) {
  internal::Require(std::isfinite(x), "syndrome input must be finite");
  const double n = std::round(x / kLatticeSpacing);
  double s = x - n * kLatticeSpacing;
  // Keep the result inside the closed interval despite rounding.
  return std::clamp(s, -kSyndromeHalfWidth, kSyndromeHalfWidth);
}

inline Eigen::Vector2d SyndromeReduce(const Eigen::Vector2d& x) {
  return {SyndromeReduce(x(0)), SyndromeReduce(x(1))};
}

// CM of z = (z_q^d, z_p^d, z_q^a, z_p^a) for xi ~ N(0, sigma2 I_4):
// z^d = cosh r xi^d - sinh r xi^a and z^a = cosh r xi^a - sinh r xi^d.
inline CovMatrix ReshapedNoiseCm(double r, NoiseVariance sigma2) {
  internal::Require(r >= 0.0 && std::isfinite(r), "r must be >= 0");
  internal::Require(sigma2.value >= 0.0, "sigma2 must be >= 0");
  const double diag = sigma2.value * std::cosh(2.0 * r);
  const double cross = -sigma2.value * std::sinh(2.0 * r);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
  v.diagonal().setConstant(diag);
  v(0, 2) = v(2, 0) = cross;
  v(1, 3) = v(3, 1) = cross;
  return CovMatrix(std::move(v));
}

// Blocks of (V_d V_da; V_da^T V_a) := [(I_2 + Omega) V_z (I_2 + Omega^T)]^{-1}.
struct NoiseBlocks {
  Eigen::Matrix2d V_d;
  Eigen::Matrix2d V_da;
  Eigen::Matrix2d V_a;
  Eigen::Matrix2d V_d_given_a;
};

inline Eigen::Matrix4d DataAncillaFrame() {
  Eigen::Matrix4d t = Eigen::Matrix4d::Zero();
  t.topLeftCorner<2, 2>().setIdentity();
  t.bottomRightCorner<2, 2>() = SymplecticFormMatrix(1);
  return t;
}

inline NoiseBlocks ConditioningBlocks(const CovMatrix& v_z) {
  internal::Require(v_z.dim() == 4, "conditioning blocks need a 4x4 CM");
  const Eigen::Matrix4d t = DataAncillaFrame();
  const Eigen::Matrix4d framed = t * Eigen::Matrix4d(v_z.matrix()) * t.transpose();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(framed);
  if (!lu.isInvertible()) throw SingularMatrix("V_z is singular");
  const Eigen::Matrix4d p = lu.inverse();
  NoiseBlocks b;
  b.V_d = p.topLeftCorner<2, 2>();
  b.V_da = p.topRightCorner<2, 2>();
  b.V_a = p.bottomRightCorner<2, 2>();
  b.V_d_given_a = b.V_a - b.V_da.transpose() * b.V_d.inverse() * b.V_da;
  return b;
}

// -V_d^{-1} V_da for a noiseless syndrome, in closed form
// tanh(2r) (0, 1; -1, 0).
inline Eigen::Matrix2d LinearEstimator(double r) {
  internal::Require(r >= 0.0 && std::isfinite(r), "r must be >= 0");
  return std::tanh(2.0 * r) * Eigen::Matrix2d(SymplecticFormMatrix(1));
}

// Same matrix from the blocks.
inline Eigen::Matrix2d LinearEstimator(const NoiseBlocks& b) {
  return -b.V_d.inverse() * b.V_da;
}

// Regression of z_d on the noisy syndrome argument Omega z_a + n. Equals
// LinearEstimator(r) for an ideal ancilla.
inline Eigen::Matrix2d EstimatorGain(double r, NoiseVariance sigma2, const GkpAncilla& anc) {
  const CovMatrix v_z = ReshapedNoiseCm(r, sigma2);
  const Eigen::Matrix2d omega = SymplecticFormMatrix(1);
  const Eigen::Matrix2d c_dw = v_z.Block(0, 1) * omega.transpose();
  const Eigen::Matrix2d v_w = omega * v_z.Block(1, 1) * omega.transpose() +
                              anc.SyndromeNoiseVariance() * Eigen::Matrix2d::Identity();
  if (v_w.determinant() <= 0.0) return Eigen::Matrix2d::Zero();
  return c_dw * v_w.inverse();
}

struct WrappedMoments {
  double y_r = 0.0;   // E[Y R(Y)]
  double r_sq = 0.0;  // E[R(Y)^2]
};

// Number of lattice images on each side so the neglected mass is < 1e-12.
inline int LatticeTruncation(double v) {
  return static_cast<int>(std::ceil((7.5 * std::sqrt(v) + kSyndromeHalfWidth) / kLatticeSpacing));
}

inline constexpr int kMaxLatticeImages = 100000;

// Moments of Y ~ N(0, v) and its wrap R(Y), by integrating the lattice-summed
// density over the syndrome interval. `truncation` overrides the image count.
inline WrappedMoments ComputeWrappedMoments(double v, int truncation = -1) {
  internal::Require(v >= 0.0 && std::isfinite(v), "variance must be >= 0");
  if (v == 0.0) return {};
  const int k_max = truncation > 0 ? truncation : LatticeTruncation(v);
  if (k_max > kMaxLatticeImages) {
    throw ConvergenceError("lattice sum truncation exceeds the image limit");
  }
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * v);
  auto images = [&](double x, double& dens, double& first) {
    dens = 0.0;
    first = 0.0;
    for (int k = -k_max; k <= k_max; ++k) {
      const double y = x + k * kLatticeSpacing;
      const double g = norm * std::exp(-y * y / (2.0 * v));
      dens += g;
      first += y * g;
    }
  };
  // Break points at a few standard deviations keep narrow peaks resolved.
  std::vector<double> breaks{-kSyndromeHalfWidth, kSyndromeHalfWidth};
  const double sd = std::sqrt(v);
  for (double k : {1.0, 3.0, 6.0}) {
    if (k * sd < kSyndromeHalfWidth) {
      breaks.push_back(-k * sd);
      breaks.push_back(k * sd);
    }
  }
  breaks.push_back(0.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  WrappedMoments m;
  m.y_r = numerics::IntegratePiecewise(
      [&](double x) {
        double dens, first;
        images(x, dens, first);
        return x * first;
      },
      breaks);
  m.r_sq = numerics::IntegratePiecewise(
      [&](double x) {
        double dens, first;
        images(x, dens, first);
        return x * x * dens;
      },
      breaks);
  return m;
}

namespace internal {

// One output quadrature: var_d = Var(z_d), c = Cov(z_d, w), var_w = Var(w).
inline double QuadratureResidual(double var_d, double c, double var_w, double syndrome_noise,
                                 int truncation) {
  const double v = var_w + syndrome_noise;
  if (v <= 0.0 || c == 0.0) return var_d;
  const double gain = c / v;
  const WrappedMoments m = ComputeWrappedMoments(v, truncation);
  return var_d - 2.0 * gain * (c / v) * m.y_r + gain * gain * m.r_sq;
}

}  // namespace internal

struct QuadratureResiduals {
  double q = 0.0;
  double p = 0.0;
};

// Output-noise variance of each data quadrature after linear decoding.
inline QuadratureResiduals ResidualVariances(double r, NoiseVariance sigma2,
                                             const GkpAncilla& anc, int truncation = -1) {
  internal::Require(r >= 0.0 && std::isfinite(r), "r must be >= 0");
  internal::Require(sigma2.value >= 0.0, "sigma2 must be >= 0");
  const CovMatrix v_z = ReshapedNoiseCm(r, sigma2);
  const Eigen::Matrix2d omega = SymplecticFormMatrix(1);
  const Eigen::Matrix2d c_dw = v_z.Block(0, 1) * omega.transpose();
  const Eigen::Matrix2d v_w = omega * v_z.Block(1, 1) * omega.transpose();
  const Eigen::Matrix2d v_d = v_z.Block(0, 0);
  // Each data quadrature correlates with exactly one syndrome component.
  QuadratureResiduals out;
  double* targets[2] = {&out.q, &out.p};
  for (int i = 0; i < 2; ++i) {
    const int j = std::abs(c_dw(i, 0)) >= std::abs(c_dw(i, 1)) ? 0 : 1;
    *targets[i] = internal::QuadratureResidual(v_d(i, i), c_dw(i, j), v_w(j, j),
                                               anc.SyndromeNoiseVariance(), truncation);
  }
  return out;
}

inline NoiseVariance ResidualVariance(double r, NoiseVariance sigma2, const GkpAncilla& anc,
                                      int truncation = -1) {
  const QuadratureResiduals res = ResidualVariances(r, sigma2, anc, truncation);
  return NoiseVariance(0.5 * (res.q + res.p));
}

struct SqueezingOptimum {
  double r_opt = 0.0;
  NoiseVariance sigma_r2{0.0};
};

// Minimises the residual over r in [0, r_max]: 201-point grid, then Brent.
inline SqueezingOptimum OptimizeSqueezing(NoiseVariance sigma2, const GkpAncilla& anc,
                                          double r_max = kMaxTmsSqueezing) {
  internal::Require(sigma2.value > 0.0, "sigma2 must be > 0");
  const auto f = [&](double r) { return ResidualVariance(r, sigma2, anc).value; };
  const numerics::Minimum m = numerics::GridThenBrent(f, 0.0, r_max, 201, 1e-9);
  // r = 0 reproduces sigma2 exactly; never report worse than that.
  if (m.value >= sigma2.value) return {0.0, sigma2};
  return {m.x, NoiseVariance(m.value)};
}

// sigma^4 / (e (1 - sigma^2)^2).
inline NoiseVariance LowerBoundVariance(NoiseVariance sigma2) {
  internal::Require(sigma2.value >= 0.0 && sigma2.value < 1.0, "lower bound needs sigma2 in [0, 1)");
  const double s = sigma2.value;
  return NoiseVariance(s * s / (std::numbers::e * (1.0 - s) * (1.0 - s)));
}

inline NoiseVariance BreakEven(NoiseVariance sigma2) { return sigma2; }

inline NoiseVariance ConcatVariance(NoiseVariance single_layer, int layers) {
  internal::Require(layers >= 1, "layer count must be >= 1");
  return NoiseVariance(layers * single_layer.value);
}

// Splits a pre-amplified link of `length_km` into `layers` equal segments,
// each corrected with its own optimised code.
inline NoiseVariance ConcatenatedResidual(double length_km, int layers, const GkpAncilla& anc,
                                          double alpha0 = kFiberAttenuationDbPerKm) {
  internal::Require(layers >= 1, "layer count must be >= 1");
  const double tau = FiberTransmittance(length_km / layers, alpha0);
  const NoiseVariance segment = AwgnVariancePreamp(tau);
  if (segment.value <= 0.0) return NoiseVariance(0.0);
  return ConcatVariance(OptimizeSqueezing(segment, anc).sigma_r2, layers);
}

}  // namespace gkpqkd

#endif  // GKPQKD_GKP_CODEC_HPP_
