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

#ifndef GKPQKD_FADING_HPP_
#define GKPQKD_FADING_HPP_

// Free-space link with a fluctuating transmittance tau_A.
//
// The density of tau_A is
//   P(tau) = r0^2 / (g s tau) (ln tau0/tau)^{2/g - 1} exp[-r0^2/(2s) (ln tau0/tau)^{2/g}]
// with g = gamma0 and s = sigma_bw^2. It is the law of
// tau0 exp(-(rho/r0)^g) for a Rayleigh beam-centroid offset rho, so every
// average is computed in u = rho^2 / (2 s), which is Exp(1) distributed.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <vector>

// Boost 1.74's pchip.hpp calls isnan unqualified.
namespace boost::math::interpolators {
using std::isnan;
}  // namespace boost::math::interpolators
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <Eigen/Dense>

#include "gkpqkd/channels.hpp"
#include "gkpqkd/errors.hpp"
#include "gkpqkd/finite_size.hpp"
#include "gkpqkd/gkp_codec.hpp"
#include "gkpqkd/numerics.hpp"
#include "gkpqkd/security.hpp"

namespace gkpqkd {

struct FadingConfig {
  double tau0 = 1.0;
  double gamma0 = 2.0;
  double r0 = 0.1;
  double sigma_bw2 = 0.0;  // m^2
  // Metadata: not used by any formula here.
  double a_R = 0.0;
  double w0 = 0.0;
  double L_A = 1.0;  // km
  double pointing_urad = 0.0;
  std::string label;

  void Validate() const {
    internal::Require(tau0 > 0.0 && tau0 <= 1.0, "tau0 must lie in (0, 1]");
    internal::Require(gamma0 > 0.0, "gamma0 must be > 0");
    internal::Require(r0 > 0.0, "r0 must be > 0");
    internal::Require(sigma_bw2 >= 0.0, "sigma_bw2 must be >= 0");
  }
  bool point_mass() const { return sigma_bw2 == 0.0; }
};

// (pointing * 1e-6 * L)^2 with L in metres.
inline double PointingWanderVariance(double L_A_km, double pointing_urad) {
  internal::Require(L_A_km >= 0.0 && pointing_urad >= 0.0, "inputs must be >= 0");
  const double x = pointing_urad * 1e-6 * L_A_km * 1e3;
  return x * x;
}

inline double FadingPdf(double tau, const FadingConfig& cfg) {
  cfg.Validate();
  if (cfg.point_mass()) throw InvalidArgument("point-mass fading has no density");
  if (!(tau > 0.0) || tau >= cfg.tau0) return 0.0;
  const double x = std::log(cfg.tau0 / tau);
  const double g = cfg.gamma0;
  const double k = cfg.r0 * cfg.r0 / cfg.sigma_bw2;
  return k / (g * tau) * std::pow(x, 2.0 / g - 1.0) * std::exp(-0.5 * k * std::pow(x, 2.0 / g));
}

// Closed form for gamma0 = 2: (tau / tau0)^{r0^2 / (2 s)}.
inline double FadingCdfGamma2(double tau, const FadingConfig& cfg) {
  internal::Require(cfg.gamma0 == 2.0, "closed-form CDF needs gamma0 = 2");
  if (tau <= 0.0) return 0.0;
  if (tau >= cfg.tau0) return 1.0;
  return std::pow(tau / cfg.tau0, cfg.r0 * cfg.r0 / (2.0 * cfg.sigma_bw2));
}

// tau as a function of the Exp(1) variable u.
inline double TransmittanceAt(double u, const FadingConfig& cfg) {
  if (cfg.point_mass() || u <= 0.0) return cfg.tau0;
  return cfg.tau0 * std::exp(-std::pow(2.0 * cfg.sigma_bw2 * u / (cfg.r0 * cfg.r0), 0.5 * cfg.gamma0));
}

inline constexpr double kFadingTailU = 46.0;  // e^{-46} ~ 1e-20

// E[f(tau)] by adaptive quadrature in u.
template <class F>
double FadingExpectation(F&& f, const FadingConfig& cfg, double rel_tol = 1e-11) {
  cfg.Validate();
  if (cfg.point_mass()) return f(cfg.tau0);
  const auto g = [&](double u) { return std::exp(-u) * f(TransmittanceAt(u, cfg)); };
  return numerics::IntegratePiecewise(g, {0.0, 0.5, 2.0, 6.0, 14.0, 26.0, kFadingTailU}, rel_tol);
}

// Same with `panels` equal 20-point Gauss-Legendre panels on [0, u_max].
template <class F>
double FadingExpectationComposite(F&& f, const FadingConfig& cfg, int panels) {
  cfg.Validate();
  if (cfg.point_mass()) return f(cfg.tau0);
  const double h = kFadingTailU / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double u) { return std::exp(-u) * f(TransmittanceAt(u, cfg)); }, i * h, (i + 1) * h);
  }
  return sum;
}

// How sigma_r^2 is chosen for each realised transmittance.
struct CodePolicy {
  GkpAncilla ancilla = GkpAncilla::Ideal();
  bool dynamic = true;  // re-optimise r per tau, else use fixed_r
  double fixed_r = 0.0;

  static CodePolicy Dynamic(GkpAncilla anc) { return {anc, true, 0.0}; }
  static CodePolicy Fixed(GkpAncilla anc, double r) { return {anc, false, r}; }

  NoiseVariance Residual(NoiseVariance sigma2) const {
    if (sigma2.value <= 0.0) return NoiseVariance(0.0);
    if (dynamic) return OptimizeSqueezing(sigma2, ancilla).sigma_r2;
    return ResidualVariance(fixed_r, sigma2, ancilla);
  }
};

// sigma_r^2 as a function of sigma^2 = 1 - tau on the support of a fading
// law, tabulated once and interpolated with monotone cubic Hermite splines.
class ResidualTable {
 public:
  static constexpr int kNodes = 512;

  ResidualTable(const FadingConfig& cfg, const CodePolicy& policy, int jobs = 1)
      : policy_(policy) {
    cfg.Validate();
    lo_ = 1.0 - cfg.tau0;
    hi_ = 1.0 - TransmittanceAt(kFadingTailU, cfg);
    if (hi_ - lo_ < 1e-14) {
      exact_ = policy_.Residual(NoiseVariance(lo_)).value;
      return;
    }
    std::vector<double> xs(kNodes), ys(kNodes);
    for (int i = 0; i < kNodes; ++i) {
      // Quadratic spacing: most mass sits near tau0.
      const double t = static_cast<double>(i) / (kNodes - 1);
      xs[i] = lo_ + (hi_ - lo_) * t * t;
    }
    const auto work = [&](int begin, int step) {
      for (int i = begin; i < kNodes; i += step) ys[i] = policy_.Residual(NoiseVariance(xs[i])).value;
    };
    jobs = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(work, j, jobs);
    work(0, jobs);
    for (auto& t : pool) t.join();
    spline_ = std::make_shared<Spline>(std::move(xs), std::move(ys));
  }

  NoiseVariance operator()(NoiseVariance sigma2) const {
    if (!spline_) return NoiseVariance(exact_);
    const double x = std::clamp(sigma2.value, lo_, hi_);
    return NoiseVariance((*spline_)(x));
  }

  const CodePolicy& policy() const { return policy_; }

 private:
  using Spline = boost::math::interpolators::pchip<std::vector<double>>;
  CodePolicy policy_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double exact_ = 0.0;
  std::shared_ptr<const Spline> spline_;
};

// Xi = E[1 / (sigma_A^2 + 2 sigma_r^2(tau) + tau_B sigma_B^2 + 2)].
inline double XiIntegral(const FadingConfig& cfg, const ProtocolParams& p,
                         const ResidualTable& table) {
  p.Validate();
  return FadingExpectation(
      [&](double tau) {
        const double sr2 = table(NoiseVariance(1.0 - tau)).value;
        return 1.0 / (p.sigma2_A + 2.0 * sr2 + p.tau_B * p.sigma2_B + 2.0);
      },
      cfg);
}

inline double XiIntegral(const FadingConfig& cfg, const ProtocolParams& p,
                         const CodePolicy& policy) {
  return XiIntegral(cfg, p, ResidualTable(cfg, policy));
}

// Conditional CM averaged over fading:
//   (Phi I, psi Z; psi Z, phi I) with
//   Phi = sigma_A^2 + 1 - (sigma_A^4 + 2 sigma_A^2) Xi,
//   psi = sqrt(tau_B (sigma_A^4 + 2 sigma_A^2)(sigma_B^4 + 2 sigma_B^2)) Xi,
//   phi = sigma_B^2 + 1 - tau_B (sigma_B^4 + 2 sigma_B^2) Xi.
inline ConditionedState FadingCmFromXi(double xi, const ProtocolParams& p) {
  const double sa = p.sigma2_A;
  const double sb = p.sigma2_B;
  const double ka = sa * sa + 2.0 * sa;
  const double kb = sb * sb + 2.0 * sb;
  const double big_phi = sa + 1.0 - ka * xi;
  const double psi = std::sqrt(p.tau_B * ka * kb) * xi;
  const double small_phi = sb + 1.0 - p.tau_B * kb * xi;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
  v(0, 0) = v(1, 1) = big_phi;
  v(2, 2) = v(3, 3) = small_phi;
  v(0, 2) = v(2, 0) = psi;
  v(1, 3) = v(3, 1) = -psi;
  return {CovMatrix(std::move(v)), xi > 0.0 ? 0.5 / xi : 0.0};
}

inline ConditionedState FadingCm(const FadingConfig& cfg, const ProtocolParams& p,
                                 const ResidualTable& table) {
  ConditionedState s = FadingCmFromXi(XiIntegral(cfg, p, table), p);
  if (!s.V.IsPhysical()) throw UnphysicalState("fading-averaged CM is unphysical");
  return s;
}

inline NoiseVariance MeanResidualVariance(const FadingConfig& cfg, const ResidualTable& table) {
  return NoiseVariance(
      FadingExpectation([&](double tau) { return table(NoiseVariance(1.0 - tau)).value; }, cfg));
}

inline double MeanTransmittance(const FadingConfig& cfg) {
  return FadingExpectation([](double tau) { return tau; }, cfg);
}

inline ComposableReport AverageComposableRate(const FadingConfig& cfg, const ProtocolParams& p,
                                              const FiniteSizeParams& fs,
                                              const ResidualTable& table) {
  return ComposableRateFromCm(FadingCm(cfg, p, table).V, p.beta0, fs);
}

}  // namespace gkpqkd

#endif  // GKPQKD_FADING_HPP_
