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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails or overruns its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "gkpqkd/gkpqkd.hpp"
#include "test_util.hpp"

namespace gkpqkd {
namespace {

using cli::LoadConfig;
using cli::RunConfig;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int Jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

RunConfig Config(const std::string& name) {
  return LoadConfig(std::string(GKPQKD_CONFIG_DIR) + "/" + name + ".yaml");
}

std::string Fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

NoiseVariance PreampNoise(double l_a) { return AwgnVariancePreamp(FiberTransmittance(l_a)); }

// 1. Optimised 20 dB residual below break-even on [0.5, 4.5] km; the gain
// must disappear somewhere in [4.5, 6] km.
Outcome CheckBreakEven() {
  const GkpAncilla anc = GkpAncilla::Finite(20.0);
  const auto gain_left = [&](double l) {
    const NoiseVariance s2 = PreampNoise(l);
    return OptimizeSqueezing(s2, anc).sigma_r2.value < s2.value * (1.0 - 1e-9);
  };
  bool below = true;
  double worst = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double l = 0.5 + 0.01 * i;
    if (!gain_left(l)) {
      below = false;
      worst = l;
      break;
    }
  }
  double crossing = NAN;
  for (int i = 0; i <= 1000; ++i) {
    const double l = 4.5 + 0.01 * i;
    if (!gain_left(l)) {
      crossing = l;
      break;
    }
  }
  const bool cross_ok = std::isfinite(crossing) && crossing <= 6.0;
  std::string d = below ? "below on [0.5,4.5]" : "not below at L_A=" + Fmt("%.2f", worst);
  d += "; gain vanishes at L_A=" + (std::isfinite(crossing) ? Fmt("%.2f km", crossing) : "> 14.5 km") +
       " (want [4.5,6])";
  return {below && cross_ok, d};
}

// 2. Ideal code vs lower bound at L_A = 3 km.
Outcome CheckLowerBoundGap() {
  const NoiseVariance s2 = PreampNoise(3.0);
  const double ratio = OptimizeSqueezing(s2, GkpAncilla::Ideal()).sigma_r2.value /
                       LowerBoundVariance(s2).value;
  return {ratio >= 3.0 && ratio <= 30.0, "ratio " + Fmt("%.3f", ratio) + " (want [3,30])"};
}

// 3. Concatenation over L_A = 3 km.
Outcome CheckConcatenation() {
  std::vector<double> v20, v25;
  for (int c = 1; c <= 8; ++c) {
    v20.push_back(ConcatenatedResidual(3.0, c, GkpAncilla::Finite(20.0)).value);
    v25.push_back(ConcatenatedResidual(3.0, c, GkpAncilla::Finite(25.0)).value);
  }
  const int argmin = 1 + static_cast<int>(std::min_element(v20.begin(), v20.end()) - v20.begin());
  int first_rise = 0;
  for (int c = 1; c < 8; ++c) {
    if (v25[c] > v25[c - 1]) {
      first_rise = c + 1;
      break;
    }
  }
  std::string d = "20 dB argmin C=" + std::to_string(argmin) + " (want 4); 25 dB ";
  d += first_rise == 0 ? "non-increasing"
                       : "rises at C=" + std::to_string(first_rise) + Fmt(" (%.5f", v25[first_rise - 2]) +
                             Fmt(" -> %.5f)", v25[first_rise - 1]);
  return {argmin == 4 && first_rise == 0, d};
}

double Search(const RunConfig& cfg, double fixed_km) {
  return cli::MaxSecureDistance(cfg, *cfg.search, fixed_km, cfg.finite_size);
}

// 4. Asymptotic frontier.
Outcome CheckAsymptotic() {
  const RunConfig unamp = Config("asymptotic_max_lb_unamplified");
  const RunConfig pre = Config("asymptotic_max_lb_preamp");
  const double l0 = Search(unamp, 0.0);
  bool ok = std::abs(l0 - 852.0) <= 5.0;
  std::string d = "L_A=0 max L_B " + Fmt("%.2f km", l0) + " (want 852+-5)";
  for (double la : {1.0, 2.0}) {
    const double u = Search(unamp, la), p = Search(pre, la);
    ok = ok && p < u;
    d += Fmt("; L_A=%.0f ", la) + Fmt("preamp %.2f", p) + Fmt(" < unamp %.2f", u);
  }
  return {ok, d};
}

// 5. Composable frontiers at N = 1e8.
Outcome CheckComposable() {
  struct Target {
    const char* config;
    double fixed, want, tol;
  };
  const Target targets[] = {{"frontier_la1_unamplified", 1.0, 12.7, 0.5},
                            {"frontier_la1_20db", 1.0, 17.5, 0.5},
                            {"frontier_la1_ideal", 1.0, 22.5, 0.5},
                            {"max_la_lb5_ideal", 5.0, 2.68, 0.1},
                            {"max_la_lb5_qt", 5.0, 4.6, 0.2}};
  bool ok = true;
  std::string d;
  for (const Target& t : targets) {
    const double got = Search(Config(t.config), t.fixed);
    const bool hit = std::abs(got - t.want) <= t.tol;
    ok = ok && hit;
    if (!d.empty()) d += "; ";
    d += std::string(t.config) + Fmt(" %.2f", got) + Fmt(" (want %.2f", t.want) + Fmt("+-%.1f)", t.tol) +
         (hit ? "" : " MISS");
  }
  return {ok, d};
}

// 6. Block-size threshold at L_A = 3, L_B = 5.
Outcome CheckBlockSize() {
  RunConfig cfg = Config("block_size_sweep");
  const double ratio = cfg.finite_size->m_pe / cfg.finite_size->N;
  const auto rate = [&](double n) {
    FiniteSizeParams fs = *cfg.finite_size;
    fs.N = n;
    fs.m_pe = ratio * n;
    return cli::ComputeRatePoint(cfg, 3.0, 5.0, fs).rate;
  };
  const double r1 = rate(1e8), r2 = rate(2e9);
  return {r1 <= 0.0 && r2 > 0.0, Fmt("R(1e8)=%.4g", r1) + Fmt(", R(2e9)=%.4g", r2)};
}

// 7. Concatenated composable frontiers with L_A = 3 km.
Outcome CheckConcatFrontier() {
  struct Target {
    const char* config;
    double want;
  };
  const Target targets[] = {{"concat_frontier_20db_c4", 5.87},
                            {"concat_frontier_25db_seg1.5", 6.38},
                            {"concat_frontier_25db_seg1", 8.43}};
  bool ok = true;
  std::string d;
  for (const Target& t : targets) {
    const double got = Search(Config(t.config), 3.0);
    ok = ok && std::abs(got - t.want) <= 0.3;
    if (!d.empty()) d += "; ";
    d += std::string(t.config) + Fmt(" %.2f", got) + Fmt(" (want %.2f+-0.3)", t.want);
  }
  return {ok, d};
}

// 8. Analytic vs Monte Carlo.
Outcome CheckOracles() {
  const McOptions mc{20260101, Jobs()};
  const std::int64_t n = 10000000;
  int fails = 0, total = 0;
  double worst_z = 0.0;
  for (double s2 : {0.05, 0.13, 0.25}) {
    for (bool ideal : {true, false}) {
      const GkpAncilla anc = ideal ? GkpAncilla::Ideal() : GkpAncilla::Finite(20.0);
      const double r_opt = OptimizeSqueezing(NoiseVariance(s2), anc).r_opt;
      for (double r : {0.3, r_opt, 1.2}) {
        const QuadratureResiduals exact = ResidualVariances(r, NoiseVariance(s2), anc);
        const McResidualResult m = McResidualVariance(r, NoiseVariance(s2), anc, n, mc);
        for (auto [a, e] : {std::pair{exact.q, m.q}, std::pair{exact.p, m.p}}) {
          const double z = std::abs(e.variance - a) / e.variance_stderr;
          worst_z = std::max(worst_z, z);
          ++total;
          if (z > 3.0) ++fails;
        }
      }
    }
  }
  ProtocolParams p;
  p.tau_B = FiberTransmittance(10.0);
  const AliceLink links[] = {
      AliceLink::Corrected(OptimizeSqueezing(PreampNoise(1.0), GkpAncilla::Ideal()).sigma_r2),
      AliceLink::PureLoss(FiberTransmittance(1.0))};
  double worst_rel = 0.0;
  for (const AliceLink& link : links) {
    const double exact = MutualInformation(ConditionedStateFor(p, link));
    const McMutualInfoResult m = McProtocolMutualInfo(p, link, n, mc);
    worst_rel = std::max(worst_rel, std::abs(m.mutual_info - exact) / exact);
  }
  const bool ok = fails == 0 && worst_rel <= 0.01;
  return {ok, std::to_string(total - fails) + "/" + std::to_string(total) + " residual checks within 3 se" +
                  Fmt(" (max |z| %.2f)", worst_z) + Fmt("; MI max rel err %.2e", worst_rel)};
}

// 9. Coverage of the worst-case estimator.
Outcome CheckCoverage() {
  ProtocolParams q;
  q.tau_B = FiberTransmittance(5.0);
  const CovMatrix truth = ConditionedStateFor(q, AliceLink::PureLoss(FiberTransmittance(1.0))).V;
  const double eps = 1e-2;
  const std::int64_t trials = 10000;
  const McCoverageResult c = McPeCoverage(truth, 100000, eps, trials, McOptions{77, Jobs()});
  const double bound = eps + 3.0 * std::sqrt(eps * (1.0 - eps) / trials);
  return {c.failure_fraction <= bound,
          Fmt("failure fraction %.4f", c.failure_fraction) + Fmt(" (bound %.4f)", bound)};
}

// Mass of (tau0 (1 - delta), tau0] in closed form; the density is not
// resolvable in double precision that close to tau0.
double TopMass(const FadingConfig& cfg, double delta) {
  const double x = -std::log1p(-delta);
  const double u = cfg.r0 * cfg.r0 / (2.0 * cfg.sigma_bw2) * std::pow(x, 2.0 / cfg.gamma0);
  return -std::expm1(-u);
}

// 10. Invariants.
Outcome CheckInvariants() {
  std::vector<std::string> bad;
  std::mt19937_64 rng(2026);

  double defect = 0.0;
  const auto track = [&](const Eigen::MatrixXd& s) {
    defect = std::max(defect, SymplecticMatrix::SymplecticDefect(s) / std::max(1.0, s.cwiseAbs2().maxCoeff()));
  };
  for (double r : {0.0, 0.3, 1.0, 2.0, 3.0}) {
    track(TmsSymplectic(r).matrix());
    track(Squeezer(r).matrix());
  }
  track(BalancedBeamSplitter().matrix());
  for (int i = 0; i < 200; ++i) track(testing::RandomSymplectic(1 + i % 3, rng));
  if (!(defect < 1e-12)) bad.push_back(Fmt("symplectic defect %.2e", defect));

  if (HFunction(1.0) != 0.0) bad.push_back("h(1) != 0");

  double congr = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int n = 1 + i % 3;
    const Eigen::MatrixXd v = testing::RandomPhysicalCm(n, rng);
    const Eigen::MatrixXd s = testing::RandomSymplectic(n, rng, 0.5);
    Eigen::MatrixXd moved = s.transpose() * v * s;
    moved = 0.5 * (moved + moved.transpose()).eval();
    const auto a = SymplecticEigenvalues(CovMatrix(v));
    const auto b = SymplecticEigenvalues(CovMatrix(moved));
    for (int k = 0; k < n; ++k) congr = std::max(congr, std::abs(a[k] - b[k]) / a[k]);
  }
  if (!(congr <= 1e-9)) bad.push_back(Fmt("congruence drift %.2e", congr));

  double norm_err = 0.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (const char* name : {"free_space_pdf_ar0.1", "free_space_pdf_ar0.05"}) {
    const FadingConfig cfg = *Config(name).fading;
    const double delta = 1e-9;
    const double mass = ts.integrate([&](double t) { return FadingPdf(t, cfg); }, 0.0,
                                     cfg.tau0 * (1.0 - delta)) +
                        TopMass(cfg, delta);
    norm_err = std::max(norm_err, std::abs(mass - 1.0));
  }
  if (!(norm_err <= 1e-6)) bad.push_back(Fmt("pdf normalization off by %.2e", norm_err));

  double pm = 0.0;
  for (double tau0 : {1.0, 0.97, FiberTransmittance(2.0)}) {
    FadingConfig cfg;
    cfg.tau0 = tau0;
    cfg.sigma_bw2 = 0.0;
    const CodePolicy policy = CodePolicy::Dynamic(GkpAncilla::Finite(20.0));
    ProtocolParams p;
    p.tau_B = FiberTransmittance(3.0);
    const ConditionedState fading = FadingCm(cfg, p, ResidualTable(cfg, policy));
    const ConditionedState fiber =
        ConditionedStateFor(p, AliceLink::Corrected(policy.Residual(NoiseVariance(1.0 - tau0))));
    pm = std::max(pm, (fading.V.matrix() - fiber.V.matrix()).cwiseAbs().maxCoeff());
  }
  if (!(pm <= 1e-9)) bad.push_back(Fmt("point-mass CM differs by %.2e", pm));

  double r0 = 0.0, trunc = 0.0;
  for (double s2 : {1e-4, 0.05, 0.13, 0.4, 1.0}) {
    for (const GkpAncilla& anc : {GkpAncilla::Ideal(), GkpAncilla::Finite(20.0)}) {
      r0 = std::max(r0, std::abs(ResidualVariance(0.0, NoiseVariance(s2), anc).value - s2) / s2);
      for (double r : {0.3, 0.9, 1.5}) {
        const CovMatrix vz = ReshapedNoiseCm(r, NoiseVariance(s2));
        const int k = LatticeTruncation(vz(2, 2) + anc.SyndromeNoiseVariance());
        const double a = ResidualVariance(r, NoiseVariance(s2), anc, k).value;
        const double b = ResidualVariance(r, NoiseVariance(s2), anc, 2 * k).value;
        trunc = std::max(trunc, std::abs(a - b) / b);
      }
    }
  }
  if (!(r0 <= 1e-9)) bad.push_back(Fmt("r=0 recovery off by %.2e", r0));
  if (!(trunc <= 1e-9)) bad.push_back(Fmt("truncation doubling drift %.2e", trunc));

  if (bad.empty()) {
    return {true, Fmt("defect %.1e", defect) + Fmt(", congruence %.1e", congr) + Fmt(", norm %.1e", norm_err) +
                      Fmt(", point-mass %.1e", pm) + Fmt(", r=0 %.1e", r0) + Fmt(", truncation %.1e", trunc)};
  }
  std::string d;
  for (const auto& b : bad) d += (d.empty() ? "" : "; ") + b;
  return {false, d};
}

// 11. Fading means under the fitted reference configs.
Outcome CheckFadingMeans() {
  struct Target {
    const char* config;
    double want;
  };
  bool ok = true;
  std::string d;
  for (const Target& t : {Target{"free_space_pdf_ar0.1", 0.0182}, Target{"free_space_pdf_ar0.05", 0.1726}}) {
    const RunConfig cfg = Config(t.config);
    const GkpAncilla anc = cfg.compensation.Ancilla();
    const CodePolicy policy = cfg.compensation.dynamic ? CodePolicy::Dynamic(anc)
                                                       : CodePolicy::Fixed(anc, cfg.compensation.fixed_r);
    const double mean = MeanResidualVariance(*cfg.fading, ResidualTable(*cfg.fading, policy, Jobs())).value;
    const double rel = std::abs(mean - t.want) / t.want;
    ok = ok && rel <= 0.05;
    if (!d.empty()) d += "; ";
    d += std::string(t.config) + Fmt(" %.5f", mean) + Fmt(" (want %.4f", t.want) + Fmt(", rel %.1e)", rel);
  }
  return {ok, d + " [fitted fading parameters]"};
}

}  // namespace
}  // namespace gkpqkd

int main() {
  using namespace gkpqkd;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "break-even crossing", 30, CheckBreakEven},
      {2, "ideal code vs lower bound", 5, CheckLowerBoundGap},
      {3, "concatenation optimum", 120, CheckConcatenation},
      {4, "asymptotic frontier", 60, CheckAsymptotic},
      {5, "composable frontier", 300, CheckComposable},
      {6, "block-size threshold", 60, CheckBlockSize},
      {7, "concatenated frontier", 300, CheckConcatFrontier},
      {8, "oracle equivalence", 600, CheckOracles},
      {9, "parameter-estimation coverage", 120, CheckCoverage},
      {10, "invariant suite", 60, CheckInvariants},
      {11, "fading means", 300, CheckFadingMeans},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %2d %-30s %s [%.1f s / %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
