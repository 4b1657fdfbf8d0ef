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

#ifndef GKPQKD_MC_ORACLE_HPP_
#define GKPQKD_MC_ORACLE_HPP_

// Sampling oracles for the analytic pipeline.
//
// Work is cut into fixed-size chunks; chunk k always draws from stream
// (seed, k), and partial sums are reduced in chunk order. Results therefore
// do not depend on the number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "gkpqkd/errors.hpp"
#include "gkpqkd/fading.hpp"
#include "gkpqkd/finite_size.hpp"
#include "gkpqkd/gkp_codec.hpp"
#include "gkpqkd/security.hpp"

namespace gkpqkd {

// Deterministic random stream keyed by (seed, stream_id).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::mt19937_64& engine() { return engine_; }

  double Normal() { return normal_(engine_); }
  double Uniform() { return uniform_(engine_); }
  double Exponential() { return exponential_(engine_); }
  double ChiSquared(double dof) { return std::chi_squared_distribution<double>(dof)(engine_); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

struct McOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
};

namespace mc_internal {

inline constexpr std::int64_t kChunk = 1 << 16;

// Runs body(chunk_index, rng, count) for every chunk and returns the
// per-chunk results in chunk order.
template <class Result, class Body>
std::vector<Result> RunChunks(std::int64_t n, const McOptions& opt, Body&& body) {
  const std::int64_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<Result> out(static_cast<std::size_t>(chunks));
  const auto work = [&](std::int64_t first, std::int64_t step) {
    for (std::int64_t c = first; c < chunks; c += step) {
      RngStream rng(opt.seed, static_cast<std::uint64_t>(c));
      const std::int64_t count = std::min(kChunk, n - c * kChunk);
      out[static_cast<std::size_t>(c)] = body(c, rng, count);
    }
  };
  const int jobs = static_cast<int>(std::clamp<std::int64_t>(opt.jobs, 1, std::max<std::int64_t>(chunks, 1)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(work, j, jobs);
  work(0, jobs);
  for (auto& t : pool) t.join();
  return out;
}

// Raw power sums of one variable.
struct Moments {
  double n = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  void Add(double x) {
    const double x2 = x * x;
    n += 1.0;
    s1 += x;
    s2 += x2;
    s3 += x2 * x;
    s4 += x2 * x2;
  }
  Moments& operator+=(const Moments& o) {
    n += o.n;
    s1 += o.s1;
    s2 += o.s2;
    s3 += o.s3;
    s4 += o.s4;
    return *this;
  }
  double Mean() const { return s1 / n; }
  double Variance() const {
    const double m = Mean();
    return std::max(0.0, s2 / n - m * m);
  }
  // Standard error of the sample variance, (m4 - var^2) / n.
  double VarianceStderr() const {
    const double m = Mean();
    const double e2 = s2 / n, e3 = s3 / n, e4 = s4 / n;
    const double m4 = e4 - 4.0 * m * e3 + 6.0 * m * m * e2 - 3.0 * m * m * m * m;
    const double var = Variance();
    return std::sqrt(std::max(0.0, m4 - var * var) / n);
  }
};

}  // namespace mc_internal

struct McEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double mean_stderr = 0.0;
  double variance_stderr = 0.0;
};

struct McResidualResult {
  McEstimate q;
  McEstimate p;
  std::int64_t samples = 0;
};

// Samples xi ~ N(0, sigma2 I_4), reshapes it, measures and wraps the ancilla
// syndrome (plus 2 Delta^2 Gaussian noise for a finite ancilla) and applies
// the linear correction. Reports the data output variance per quadrature.
inline McResidualResult McResidualVariance(double r, NoiseVariance sigma2, const GkpAncilla& anc,
                                           std::int64_t n_samples, const McOptions& opt) {
  internal::Require(n_samples >= 1, "n_samples must be >= 1");
  internal::Require(r >= 0.0 && sigma2.value >= 0.0, "invalid residual arguments");
  const double sd = std::sqrt(sigma2.value);
  const double ch = std::cosh(r), sh = std::sinh(r);
  const double syn_sd = std::sqrt(anc.SyndromeNoiseVariance());
  const Eigen::Matrix2d phi = EstimatorGain(r, sigma2, anc);
  const Eigen::Matrix2d omega = SymplecticFormMatrix(1);
  struct Pair {
    mc_internal::Moments q, p;
  };
  const auto parts = mc_internal::RunChunks<Pair>(
      n_samples, opt, [&](std::int64_t, RngStream& rng, std::int64_t count) {
        Pair acc;
        for (std::int64_t i = 0; i < count; ++i) {
          const Eigen::Vector2d xd(sd * rng.Normal(), sd * rng.Normal());
          const Eigen::Vector2d xa(sd * rng.Normal(), sd * rng.Normal());
          const Eigen::Vector2d zd = ch * xd - sh * xa;
          const Eigen::Vector2d za = ch * xa - sh * xd;
          Eigen::Vector2d w = omega * za;
          if (syn_sd > 0.0) {
            w(0) += syn_sd * rng.Normal();
            w(1) += syn_sd * rng.Normal();
          }
          const Eigen::Vector2d out = zd - phi * SyndromeReduce(w);
          acc.q.Add(out(0));
          acc.p.Add(out(1));
        }
        return acc;
      });
  mc_internal::Moments q, p;
  for (const auto& part : parts) {
    q += part.q;
    p += part.p;
  }
  const auto pack = [](const mc_internal::Moments& m) {
    return McEstimate{m.Mean(), m.Variance(), std::sqrt(m.Variance() / m.n), m.VarianceStderr()};
  };
  return {pack(q), pack(p), n_samples};
}

struct McMutualInfoResult {
  double mutual_info = 0.0;
  double stderr_ = 0.0;
  double corr_x_relay = 0.0;  // sample correlation <q_x q_R>
  double corr_y_relay = 0.0;  // sample correlation <q_y q_R>
  double corr_stderr = 0.0;   // 1 / sqrt(n)
  std::int64_t samples = 0;
};

// Prepare-and-measure simulation in SNU. Alice and Bob send displaced
// coherent states with Gaussian amplitudes; Alice's link has transmittance
// tau and adds 2 sigma_add^2 of noise, Bob's is pure loss. The relay mixes
// the modes on a balanced beam splitter and homodynes q_- and p_+; with
// vacuum inputs its noise has variance (1 + 2 sigma_add^2 + 1) / 2. The
// parties displace their data by the regression on the announced outcome,
// which removes all correlation with it, and the Gaussian mutual
// information is read off the sample correlation per quadrature.
inline McMutualInfoResult McProtocolMutualInfo(const ProtocolParams& params, const AliceLink& link,
                                               std::int64_t n_samples, const McOptions& opt) {
  params.Validate();
  internal::Require(n_samples >= 2, "n_samples must be >= 2");
  const double sa = std::sqrt(params.sigma2_A), sb = std::sqrt(params.sigma2_B);
  const double ga = std::sqrt(link.tau / 2.0), gb = std::sqrt(params.tau_B / 2.0);
  const double relay_sd = std::sqrt(1.0 + link.added_noise.value);
  const double var_r = ga * ga * params.sigma2_A + gb * gb * params.sigma2_B + relay_sd * relay_sd;
  // Optimal displacements x = a - k_a R, y = b - k_b R; signs per quadrature.
  const double ka[2] = {-ga * params.sigma2_A / var_r, ga * params.sigma2_A / var_r};
  const double kb = gb * params.sigma2_B / var_r;
  // Sums over (x, y, R): xx, yy, xy, xR, yR, RR per quadrature.
  struct Sums {
    double s[2][6] = {};
  };
  const auto parts = mc_internal::RunChunks<Sums>(
      n_samples, opt, [&](std::int64_t, RngStream& rng, std::int64_t count) {
        Sums acc;
        for (std::int64_t i = 0; i < count; ++i) {
          for (int quad = 0; quad < 2; ++quad) {
            const double a = sa * rng.Normal();
            const double b = sb * rng.Normal();
            const double sign = quad == 0 ? -1.0 : 1.0;
            const double rel = gb * b + sign * ga * a + relay_sd * rng.Normal();
            const double x = a - ka[quad] * rel;
            const double y = b - kb * rel;
            double* s = acc.s[quad];
            s[0] += x * x;
            s[1] += y * y;
            s[2] += x * y;
            s[3] += x * rel;
            s[4] += y * rel;
            s[5] += rel * rel;
          }
        }
        return acc;
      });
  Sums total;
  for (const auto& part : parts) {
    for (int quad = 0; quad < 2; ++quad) {
      for (int k = 0; k < 6; ++k) total.s[quad][k] += part.s[quad][k];
    }
  }
  McMutualInfoResult out;
  out.samples = n_samples;
  const double n = static_cast<double>(n_samples);
  double var_i = 0.0;
  for (int quad = 0; quad < 2; ++quad) {
    const double* s = total.s[quad];
    // A quadrature without spread carries no information.
    const double rho = s[0] > 0.0 && s[1] > 0.0 ? s[2] / std::sqrt(s[0] * s[1]) : 0.0;
    out.mutual_info += -0.5 * std::log2(1.0 - rho * rho);
    const double di = std::abs(rho) / std::log(2.0);  // dI/drho times (1 - rho^2)
    var_i += di * di / n;
    if (quad == 0) {
      out.corr_x_relay = s[0] > 0.0 ? s[3] / std::sqrt(s[0] * s[5]) : 0.0;
      out.corr_y_relay = s[1] > 0.0 ? s[4] / std::sqrt(s[1] * s[5]) : 0.0;
    }
  }
  out.stderr_ = std::sqrt(var_i);
  out.corr_stderr = 1.0 / std::sqrt(n);
  return out;
}

struct McCoverageResult {
  double failure_fraction = 0.0;
  std::int64_t failures = 0;
  std::int64_t trials = 0;
  double kappa = 0.0;
  // One-sided binomial 3-sigma margin at eps_pe.
  double margin = 0.0;
};

enum class PeSampling { kWishart, kDirect };

// Simulates parameter-estimation rounds of m_pe Gaussian pairs drawn from the
// true two-mode CM. A round fails when the true <q_a q_b> lies below its
// worst-case estimate or the true <p_a p_b> lies above its worst-case estimate.
// kWishart draws the 2x2 scatter matrix by the Bartlett decomposition, which
// has the same law as summing m_pe outer products (kDirect).
inline McCoverageResult McPeCoverage(const CovMatrix& true_cm, std::int64_t m_pe, double eps_pe,
                                     std::int64_t n_trials, const McOptions& opt,
                                     PeSampling sampling = PeSampling::kWishart) {
  internal::Require(true_cm.dim() == 4, "coverage needs a two-mode CM");
  internal::Require(m_pe >= 2 && n_trials >= 1, "invalid coverage sizes");
  const double kappa = KappaFromEps(eps_pe);
  const double m = static_cast<double>(m_pe);
  const double shift = 2.0 * std::sqrt(kappa / m);
  Eigen::Matrix2d chol[2];
  double truth[2];
  for (int quad = 0; quad < 2; ++quad) {
    Eigen::Matrix2d s;
    s << true_cm(quad, quad), true_cm(quad, 2 + quad), true_cm(quad, 2 + quad),
        true_cm(2 + quad, 2 + quad);
    Eigen::LLT<Eigen::Matrix2d> llt(s);
    if (llt.info() != Eigen::Success) throw InvalidArgument("CM block is not positive-definite");
    chol[quad] = llt.matrixL();
    truth[quad] = s(0, 1);
  }
  const auto parts = mc_internal::RunChunks<std::int64_t>(
      n_trials, opt, [&](std::int64_t, RngStream& rng, std::int64_t count) {
        std::int64_t failures = 0;
        for (std::int64_t t = 0; t < count; ++t) {
          bool failed = false;
          for (int quad = 0; quad < 2; ++quad) {
            Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
            if (sampling == PeSampling::kWishart) {
              Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
              a(0, 0) = std::sqrt(rng.ChiSquared(m));
              a(1, 1) = std::sqrt(rng.ChiSquared(m - 1.0));
              a(1, 0) = rng.Normal();
              const Eigen::Matrix2d la = chol[quad] * a;
              scatter = la * la.transpose();
            } else {
              for (std::int64_t k = 0; k < m_pe; ++k) {
                const Eigen::Vector2d x = chol[quad] * Eigen::Vector2d(rng.Normal(), rng.Normal());
                scatter += x * x.transpose();
              }
            }
            const double mu_plus = (scatter(0, 0) + scatter(1, 1) + 2.0 * scatter(0, 1)) / m;
            const double mu_minus = (scatter(0, 0) + scatter(1, 1) - 2.0 * scatter(0, 1)) / m;
            const double sign = quad == 0 ? -1.0 : 1.0;
            const double wc = 0.25 * ((mu_plus - mu_minus) + sign * shift * (mu_plus + mu_minus));
            failed |= quad == 0 ? truth[quad] < wc : truth[quad] > wc;
          }
          failures += failed ? 1 : 0;
        }
        return failures;
      });
  McCoverageResult out;
  for (auto f : parts) out.failures += f;
  out.trials = n_trials;
  out.failure_fraction = static_cast<double>(out.failures) / static_cast<double>(n_trials);
  out.kappa = kappa;
  out.margin = 3.0 * std::sqrt(eps_pe * (1.0 - eps_pe) / static_cast<double>(n_trials));
  return out;
}

// Mean and standard error of f(tau) for tau drawn from the fading law.
inline McEstimate McFadingMean(const std::function<double(double)>& f, const FadingConfig& cfg,
                               std::int64_t n_samples, const McOptions& opt) {
  cfg.Validate();
  const auto parts = mc_internal::RunChunks<mc_internal::Moments>(
      n_samples, opt, [&](std::int64_t, RngStream& rng, std::int64_t count) {
        mc_internal::Moments m;
        for (std::int64_t i = 0; i < count; ++i) m.Add(f(TransmittanceAt(rng.Exponential(), cfg)));
        return m;
      });
  mc_internal::Moments total;
  for (const auto& part : parts) total += part;
  return {total.Mean(), total.Variance(), std::sqrt(total.Variance() / total.n), total.VarianceStderr()};
}

}  // namespace gkpqkd

#endif  // GKPQKD_MC_ORACLE_HPP_
