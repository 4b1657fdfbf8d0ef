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

#ifndef GKPQKD_NUMERICS_HPP_
#define GKPQKD_NUMERICS_HPP_

// Thin wrappers over Boost.Math: adaptive quadrature, 1-D minimisation and
// the outermost-positive root scan used for maximum secure distances.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "gkpqkd/errors.hpp"

namespace gkpqkd::numerics {

inline constexpr double kQuadratureRelTol = 1e-9;
inline constexpr unsigned kQuadratureMaxDepth = 12;
// The |Kronrod - Gauss| estimate is very pessimistic for smooth integrands;
// only a gross miss is reported as non-convergence.
inline constexpr double kQuadratureFailFactor = 1e4;

// Adaptive 31-point Gauss-Kronrod (embedded 15-point Gauss-Legendre) on
// [a, b]. Throws ConvergenceError if the error estimate stays above tolerance.
template <class F>
double Integrate(F&& f, double a, double b, double rel_tol = kQuadratureRelTol,
                 double abs_tol = 1e-15) {
  using Gk = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (a == b) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  // Boost stops on a relative criterion only; fold the absolute floor into it
  // using the scale from a single-panel pass.
  Gk::integrate(f, a, b, 0, rel_tol, &error, &l1);
  const double tol = std::max(rel_tol, abs_tol / std::max(l1, 1e-300));
  const double value = Gk::integrate(f, a, b, kQuadratureMaxDepth, tol, &error, &l1);
  if (!std::isfinite(value) || error > std::max(abs_tol, kQuadratureFailFactor * rel_tol * l1)) {
    throw ConvergenceError("adaptive quadrature did not converge");
  }
  return value;
}

// Integral over consecutive breakpoints, each piece adaptive.
template <class F>
double IntegratePiecewise(F&& f, const std::vector<double>& breaks,
                          double rel_tol = kQuadratureRelTol) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    sum += Integrate(f, breaks[i], breaks[i + 1], rel_tol);
  }
  return sum;
}

struct Minimum {
  double x;
  double value;
};

// Minimises f on [lo, hi]: coarse grid of `grid_points` then Brent's method
// (golden section with parabolic steps) in the bracketing cell.
template <class F>
Minimum GridThenBrent(F&& f, double lo, double hi, int grid_points = 201,
                      double x_tol = 1e-9) {
  internal::Require(hi > lo && grid_points >= 3, "invalid minimisation interval");
  const double step = (hi - lo) / (grid_points - 1);
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double value = f(lo + i * step);
    if (value < best_value) {
      best_value = value;
      best = i;
    }
  }
  const double a = lo + std::max(best - 1, 0) * step;
  const double b = lo + std::min(best + 1, grid_points - 1) * step;
  const int bits = std::max(8, static_cast<int>(-std::log2(x_tol)));
  std::uintmax_t iterations = 200;
  const auto [x, value] = boost::math::tools::brent_find_minima(f, a, b, bits, iterations);
  if (value <= best_value) return {x, value};
  return {lo + best * step, best_value};
}

// Bisection for a sign change of f on [lo, hi] down to `x_tol`.
template <class F>
double Bisect(F&& f, double lo, double hi, double x_tol) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  internal::Require((f_lo > 0.0) != (f_hi > 0.0), "root not bracketed");
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Largest x in [lo, hi_max] with f(x) > 0, assuming f > 0 near lo and
// f <= 0 beyond some point. The positive set may flicker near its edge (rate
// curves evaluated in double precision do), so this scans outward on a grid
// of `scan_step` and bisects only inside the last positive cell.
// Returns lo if f(lo) <= 0 and hi_max if f stays positive.
template <class F>
double OutermostPositive(F&& f, double lo, double hi_max, double scan_step,
                         double x_tol) {
  internal::Require(hi_max > lo && scan_step > 0.0, "invalid scan interval");
  if (!(f(lo) > 0.0)) return lo;
  double last_positive = lo;
  for (double x = lo + scan_step; x <= hi_max + 1e-12; x += scan_step) {
    if (f(x) > 0.0) last_positive = x;
  }
  if (last_positive + scan_step > hi_max) return hi_max;
  return Bisect(f, last_positive, last_positive + scan_step, x_tol);
}

}  // namespace gkpqkd::numerics

#endif  // GKPQKD_NUMERICS_HPP_
