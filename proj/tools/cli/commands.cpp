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

#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "gkpqkd/mc_oracle.hpp"
#include "gkpqkd/numerics.hpp"

namespace gkpqkd::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs fn(i) for i in [0, n) on `jobs` threads; results keep index order.
template <class T>
std::vector<T> ParallelMap(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

// Parameter echo shared by residual, rate and fading rows.
std::vector<Column> EchoColumns(const RunConfig& cfg) {
  std::vector<Column> c{{"label", "1"},
                        {"scenario", "1"},
                        {"sigma2_A_snu", "snu"},
                        {"sigma2_B_snu", "snu"},
                        {"beta0", "1"},
                        {"alpha0_db_per_km", "dB/km"},
                        {"n_bar", "photons"},
                        {"lambda_nm", "nm"},
                        {"compensation", "1"},
                        {"gkp_squeezing_db", "dB"},
                        {"tmsv_squeezing_db", "dB"},
                        {"code_policy", "1"},
                        {"fixed_r", "1"},
                        {"finite_size", "1"},
                        {"N", "pulses"},
                        {"m_pe", "pulses"},
                        {"d", "1"},
                        {"p_ec", "1"},
                        {"eps_cor", "1"},
                        {"eps_s", "1"},
                        {"eps_h", "1"},
                        {"eps_pe", "1"}};
  if (cfg.fading) {
    c.insert(c.end(), {{"tau0", "1"},
                       {"gamma0", "1"},
                       {"r0_m", "m"},
                       {"sigma_bw2_m2", "m^2"},
                       {"aperture_radius_m", "m"},
                       {"fading_label", "1"}});
  }
  c.push_back({"schema_version", "1"});
  return c;
}

void AddEcho(const RunConfig& cfg, const std::optional<FiniteSizeParams>& fs,
             std::map<std::string, Cell>& row) {
  const ProtocolParams& p = cfg.protocol;
  const CompensationConfig& k = cfg.compensation;
  row["label"] = cfg.label;
  row["scenario"] = std::string(ToString(cfg.scenario));
  row["sigma2_A_snu"] = p.sigma2_A;
  row["sigma2_B_snu"] = p.sigma2_B;
  row["beta0"] = p.beta0;
  row["alpha0_db_per_km"] = p.alpha0;
  row["n_bar"] = p.n_bar;
  row["lambda_nm"] = p.lambda_nm;
  row["compensation"] = std::string(ToString(k.kind));
  const bool coded = k.kind == Compensation::kGkp || k.kind == Compensation::kQt;
  if (coded) {
    row["gkp_squeezing_db"] = k.gkp_squeezing_db ? Cell(*k.gkp_squeezing_db) : Cell(std::string("ideal"));
    row["code_policy"] = std::string(k.dynamic ? "dynamic" : "fixed");
    if (!k.dynamic) row["fixed_r"] = k.fixed_r;
  }
  if (k.kind == Compensation::kQt) row["tmsv_squeezing_db"] = k.tmsv_squeezing_db;
  row["finite_size"] = fs.has_value();
  if (fs) {
    row["N"] = fs->N;
    row["m_pe"] = fs->m_pe;
    row["d"] = static_cast<std::int64_t>(fs->d);
    row["p_ec"] = fs->p_ec;
    row["eps_cor"] = fs->eps_cor;
    row["eps_s"] = fs->eps_s;
    row["eps_h"] = fs->eps_h;
    row["eps_pe"] = fs->eps_pe;
  }
  if (cfg.fading) {
    row["tau0"] = cfg.fading->tau0;
    row["gamma0"] = cfg.fading->gamma0;
    row["r0_m"] = cfg.fading->r0;
    row["sigma_bw2_m2"] = cfg.fading->sigma_bw2;
    row["aperture_radius_m"] = cfg.fading->a_R;
    row["fading_label"] = cfg.fading->label;
  }
  row["schema_version"] = std::string(kSchemaVersion);
}

std::vector<Column> Concat(std::vector<Column> a, const std::vector<Column>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Cell Num(double x) { return std::isfinite(x) ? Cell(x) : Cell(); }

void RequireAxis(const RunConfig& cfg, std::initializer_list<const char*> allowed,
                 const char* command) {
  for (const char* a : allowed) {
    if (cfg.sweep.axis == a) return;
  }
  throw ConfigError(cfg.path + ": sweep axis '" + cfg.sweep.axis + "' is not valid for " + command);
}

// Uncorrected AWGN variance of an arm of `length_km`.
double ArmNoise(const RunConfig& cfg, double length_km) {
  const double tau = FiberTransmittance(length_km, cfg.protocol.alpha0);
  if (cfg.compensation.kind == Compensation::kQt) {
    return AwgnVarianceQt(tau, cfg.compensation.tmsv_squeezing_db).value;
  }
  return AwgnVariancePreamp(tau, cfg.protocol.n_bar).value;
}

int LayerValue(double x, const RunConfig& cfg) {
  if (!(x >= 1.0) || x != std::floor(x) || x > 1e6) {
    throw ConfigError(cfg.path + ": concatenation levels C must be integers >= 1");
  }
  return static_cast<int>(x);
}

std::optional<FiniteSizeParams> WithBlockSize(const std::optional<FiniteSizeParams>& fs, double n,
                                              const RunConfig& cfg) {
  if (!fs) throw ConfigError(cfg.path + ": sweep axis N needs a finite_size block");
  FiniteSizeParams out = *fs;
  out.m_pe = fs->m_pe / fs->N * n;
  out.N = n;
  if (out.m_pe < kMinPeSamples) throw ConfigError(cfg.path + ": N too small for >= 1e4 PE signals");
  return out;
}

}  // namespace

ArmResidual ComputeArmResidual(const RunConfig& cfg, double length_km, int layers) {
  ArmResidual out;
  out.layers = layers;
  out.sigma2 = ArmNoise(cfg, length_km);
  const Compensation kind = cfg.compensation.kind;
  if (kind != Compensation::kGkp && kind != Compensation::kQt) {
    out.sigma_r2 = out.sigma2;
    return out;
  }
  const double segment = ArmNoise(cfg, length_km / layers);
  if (!(segment > 0.0)) return out;
  const GkpAncilla anc = cfg.compensation.Ancilla();
  if (cfg.compensation.dynamic) {
    const SqueezingOptimum opt = OptimizeSqueezing(NoiseVariance(segment), anc);
    out.r_opt = opt.r_opt;
    out.sigma_r2 = ConcatVariance(opt.sigma_r2, layers).value;
  } else {
    out.r_opt = cfg.compensation.fixed_r;
    out.sigma_r2 =
        ConcatVariance(ResidualVariance(out.r_opt, NoiseVariance(segment), anc), layers).value;
  }
  return out;
}

RatePoint ComputeRatePoint(const RunConfig& cfg, double l_a, double l_b,
                           const std::optional<FiniteSizeParams>& fs) {
  ProtocolParams p = cfg.protocol;
  p.L_A = l_a;
  p.L_B = l_b;
  p.tau_A = FiberTransmittance(l_a, p.alpha0);
  p.tau_B = FiberTransmittance(l_b, p.alpha0);
  AliceLink link;
  RatePoint out;
  switch (cfg.compensation.kind) {
    case Compensation::kNone:
      link = AliceLink::PureLoss(p.tau_A);
      out.sigma_r2 = kNaN;
      break;
    case Compensation::kPreamp:
      link = AliceLink::PreampOnly(p.tau_A, p.n_bar);
      out.sigma_r2 = link.added_noise.value;
      break;
    default: {
      const ArmResidual arm = ComputeArmResidual(cfg, l_a, cfg.compensation.LayersFor(l_a));
      link = AliceLink::Corrected(NoiseVariance(arm.sigma_r2));
      out.sigma_r2 = arm.sigma_r2;
    }
  }
  if (!fs) {
    out.report = AsymptoticRate(p, link);
    out.rate = out.report.rate;
    return out;
  }
  try {
    const ComposableReport r = ComposableRate(p, link, *fs);
    out.report = r.pe;
    out.rate = r.rate;
  } catch (const UnphysicalState&) {
    out.physical = false;
    out.rate = kNaN;
  }
  return out;
}

double MaxSecureDistance(const RunConfig& cfg, const SearchConfig& search, double fixed_km,
                         const std::optional<FiniteSizeParams>& fs) {
  const auto f = [&](double x) {
    const RatePoint r = search.axis == "L_B" ? ComputeRatePoint(cfg, fixed_km, x, fs)
                                             : ComputeRatePoint(cfg, x, fixed_km, fs);
    return std::isfinite(r.rate) ? r.rate : -1.0;
  };
  if (!(f(search.min_km) > 0.0)) return 0.0;
  return numerics::OutermostPositive(f, search.min_km, search.max_km, search.scan_step_km,
                                     search.resolution_km);
}

CommandResult RunResidual(const RunConfig& cfg, const RunOptions& opt) {
  RequireAxis(cfg, {"L_A", "C"}, "residual");
  if (cfg.scenario != Scenario::kFiber) throw ConfigError(cfg.path + ": residual needs scenario fiber");
  const std::vector<Column> cols = Concat({{"L_A_km", "km"},
                                           {"C", "1"},
                                           {"segment_km", "km"},
                                           {"sigma2_vac_half", "vac_half"},
                                           {"sigma_r2_vac_half", "vac_half"},
                                           {"sigma_be2_vac_half", "vac_half"},
                                           {"sigma_LB2_vac_half", "vac_half"},
                                           {"r_opt", "1"},
                                           {"below_break_even", "1"}},
                                          EchoColumns(cfg));
  CommandResult res{Table("residual", cols), true};
  const auto& values = cfg.sweep.values;
  const bool by_layers = cfg.sweep.axis == "C";
  const auto rows = ParallelMap<std::map<std::string, Cell>>(
      values.size(), opt.jobs, [&](std::size_t i) {
        const double l_a = by_layers ? cfg.protocol.L_A : values[i];
        if (!(l_a >= 0.0)) throw ConfigError(cfg.path + ": L_A must be >= 0");
        const int layers = by_layers ? LayerValue(values[i], cfg) : cfg.compensation.LayersFor(l_a);
        const ArmResidual arm = ComputeArmResidual(cfg, l_a, layers);
        std::map<std::string, Cell> row;
        row["L_A_km"] = l_a;
        row["C"] = static_cast<std::int64_t>(layers);
        row["segment_km"] = l_a / layers;
        row["sigma2_vac_half"] = arm.sigma2;
        row["sigma_r2_vac_half"] = arm.sigma_r2;
        row["sigma_be2_vac_half"] = arm.sigma2;
        if (arm.sigma2 < 1.0) row["sigma_LB2_vac_half"] = LowerBoundVariance(NoiseVariance(arm.sigma2)).value;
        row["r_opt"] = arm.r_opt;
        row["below_break_even"] = arm.sigma_r2 < arm.sigma2;
        AddEcho(cfg, std::nullopt, row);
        return row;
      });
  for (const auto& r : rows) res.table.AddRow(r);
  return res;
}

CommandResult RunRate(const RunConfig& cfg, const RunOptions& opt) {
  RequireAxis(cfg, {"L_A", "L_B", "N"}, "rate");
  if (cfg.scenario != Scenario::kFiber) {
    throw ConfigError(cfg.path + ": rate needs scenario fiber; use the fading command");
  }
  const auto& values = cfg.sweep.values;
  const std::string& axis = cfg.sweep.axis;
  const auto point_of = [&](double v) {
    double l_a = cfg.protocol.L_A, l_b = cfg.protocol.L_B;
    std::optional<FiniteSizeParams> fs = cfg.finite_size;
    if (axis == "L_A") l_a = v;
    if (axis == "L_B") l_b = v;
    if (axis == "N") fs = WithBlockSize(cfg.finite_size, v, cfg);
    if (!(l_a >= 0.0 && l_b >= 0.0)) throw ConfigError(cfg.path + ": distances must be >= 0");
    return std::make_tuple(l_a, l_b, fs);
  };
  if (cfg.search) {
    const std::vector<Column> cols = Concat({{"L_A_km", "km"},
                                             {"L_B_km", "km"},
                                             {"search_axis", "1"},
                                             {"max_distance_km", "km"},
                                             {"resolution_km", "km"}},
                                            EchoColumns(cfg));
    CommandResult res{Table("rate", cols), true};
    const auto rows = ParallelMap<std::map<std::string, Cell>>(
        values.size(), opt.jobs, [&](std::size_t i) {
          auto [l_a, l_b, fs] = point_of(values[i]);
          const bool along_b = cfg.search->axis == "L_B";
          const double d = MaxSecureDistance(cfg, *cfg.search, along_b ? l_a : l_b, fs);
          std::map<std::string, Cell> row;
          row["L_A_km"] = along_b ? l_a : d;
          row["L_B_km"] = along_b ? d : l_b;
          row["search_axis"] = cfg.search->axis;
          row["max_distance_km"] = d;
          row["resolution_km"] = cfg.search->resolution_km;
          AddEcho(cfg, fs, row);
          return row;
        });
    for (const auto& r : rows) res.table.AddRow(r);
    return res;
  }
  const std::vector<Column> cols = Concat({{"L_A_km", "km"},
                                           {"L_B_km", "km"},
                                           {"sigma_r2_vac_half", "vac_half"},
                                           {"R_bits_per_use", "bits/use"},
                                           {"rate_kind", "1"},
                                           {"I_bits_per_use", "bits/use"},
                                           {"chi_bits_per_use", "bits/use"},
                                           {"v1_snu", "snu"},
                                           {"v2_snu", "snu"},
                                           {"v3_snu", "snu"},
                                           {"physical", "1"}},
                                          EchoColumns(cfg));
  CommandResult res{Table("rate", cols), true};
  const auto rows = ParallelMap<std::map<std::string, Cell>>(
      values.size(), opt.jobs, [&](std::size_t i) {
        auto [l_a, l_b, fs] = point_of(values[i]);
        const RatePoint r = ComputeRatePoint(cfg, l_a, l_b, fs);
        std::map<std::string, Cell> row;
        row["L_A_km"] = l_a;
        row["L_B_km"] = l_b;
        row["sigma_r2_vac_half"] = Num(r.sigma_r2);
        row["R_bits_per_use"] = Num(r.rate);
        row["rate_kind"] = std::string(fs ? "composable" : "asymptotic");
        row["physical"] = r.physical;
        if (r.physical) {
          row["I_bits_per_use"] = r.report.mutual_info;
          row["chi_bits_per_use"] = r.report.holevo;
          row["v1_snu"] = r.report.spectrum.v1;
          row["v2_snu"] = r.report.spectrum.v2;
          row["v3_snu"] = r.report.spectrum.v3;
        }
        AddEcho(cfg, fs, row);
        return row;
      });
  for (const auto& r : rows) res.table.AddRow(r);
  return res;
}

CommandResult RunFading(const RunConfig& cfg, const RunOptions& opt) {
  RequireAxis(cfg, {"tau", "L_B"}, "fading");
  if (cfg.scenario != Scenario::kFreeSpace || !cfg.fading) {
    throw ConfigError(cfg.path + ": fading needs scenario free_space with a fading block");
  }
  if (cfg.compensation.kind != Compensation::kGkp) {
    throw ConfigError(cfg.path + ": fading supports compensation kind gkp only");
  }
  if (cfg.search) throw ConfigError(cfg.path + ": search is not supported by fading");
  const FadingConfig& fc = *cfg.fading;
  const GkpAncilla anc = cfg.compensation.Ancilla();
  const CodePolicy policy = cfg.compensation.dynamic ? CodePolicy::Dynamic(anc)
                                                     : CodePolicy::Fixed(anc, cfg.compensation.fixed_r);
  const ResidualTable table(fc, policy, opt.jobs);
  const double mean_sr2 = MeanResidualVariance(fc, table).value;
  const double mean_tau = MeanTransmittance(fc);
  const std::optional<FiniteSizeParams>& fs = cfg.finite_size;

  if (cfg.sweep.axis == "tau") {
    if (fc.point_mass()) throw ConfigError(cfg.path + ": point-mass fading has no density to sample");
    const std::vector<Column> cols = Concat({{"tau", "1"},
                                             {"pdf_tau", "1"},
                                             {"sigma2_vac_half", "vac_half"},
                                             {"sigma_r2_vac_half", "vac_half"},
                                             {"mean_sigma_r2_vac_half", "vac_half"},
                                             {"mean_tau", "1"}},
                                            EchoColumns(cfg));
    CommandResult res{Table("fading", cols), true};
    // Nodes graded towards tau0, where the density piles up (and diverges
    // for gamma > 2): u = u_max (i/n)^3. Nodes that round to the same tau,
    // or to tau0 itself, are dropped.
    const int n = cfg.sweep.points;
    double last = -1.0;
    for (int i = n; i >= 1; --i) {
      const double t = static_cast<double>(i) / n;
      const double tau = TransmittanceAt(kFadingTailU * t * t * t, fc);
      if (tau == last || tau >= fc.tau0) continue;
      last = tau;
      std::map<std::string, Cell> row;
      row["tau"] = tau;
      row["pdf_tau"] = FadingPdf(tau, fc);
      row["sigma2_vac_half"] = 1.0 - tau;
      row["sigma_r2_vac_half"] = table(NoiseVariance(1.0 - tau)).value;
      row["mean_sigma_r2_vac_half"] = mean_sr2;
      row["mean_tau"] = mean_tau;
      AddEcho(cfg, fs, row);
      res.table.AddRow(row);
    }
    return res;
  }

  const std::vector<Column> cols = Concat({{"L_B_km", "km"},
                                           {"R_bits_per_use", "bits/use"},
                                           {"rate_kind", "1"},
                                           {"I_bits_per_use", "bits/use"},
                                           {"chi_bits_per_use", "bits/use"},
                                           {"v1_snu", "snu"},
                                           {"v2_snu", "snu"},
                                           {"v3_snu", "snu"},
                                           {"xi", "1"},
                                           {"physical", "1"},
                                           {"mean_sigma_r2_vac_half", "vac_half"},
                                           {"mean_tau", "1"}},
                                          EchoColumns(cfg));
  CommandResult res{Table("fading", cols), true};
  const auto& values = cfg.sweep.values;
  const auto rows = ParallelMap<std::map<std::string, Cell>>(
      values.size(), opt.jobs, [&](std::size_t i) {
        const double l_b = values[i];
        if (!(l_b >= 0.0)) throw ConfigError(cfg.path + ": L_B must be >= 0");
        ProtocolParams p = cfg.protocol;
        p.L_B = l_b;
        p.tau_B = FiberTransmittance(l_b, p.alpha0);
        const double xi = XiIntegral(fc, p, table);
        std::map<std::string, Cell> row;
        row["L_B_km"] = l_b;
        row["xi"] = xi;
        row["rate_kind"] = std::string(fs ? "composable" : "asymptotic");
        row["mean_sigma_r2_vac_half"] = mean_sr2;
        row["mean_tau"] = mean_tau;
        bool physical = true;
        RateReport rep;
        double rate = kNaN;
        try {
          const ConditionedState s = FadingCmFromXi(xi, p);
          if (fs) {
            const ComposableReport c = ComposableRateFromCm(s.V, p.beta0, *fs);
            rep = c.pe;
            rate = c.rate;
          } else {
            rep = RateFromCm(s.V, p.beta0);
            rate = rep.rate;
          }
        } catch (const UnphysicalState&) {
          physical = false;
        }
        row["R_bits_per_use"] = Num(rate);
        row["physical"] = physical;
        if (physical) {
          row["I_bits_per_use"] = rep.mutual_info;
          row["chi_bits_per_use"] = rep.holevo;
          row["v1_snu"] = rep.spectrum.v1;
          row["v2_snu"] = rep.spectrum.v2;
          row["v3_snu"] = rep.spectrum.v3;
        }
        AddEcho(cfg, fs, row);
        return row;
      });
  for (const auto& r : rows) res.table.AddRow(r);
  return res;
}

namespace {

struct Check {
  std::string name;
  double analytic = 0.0;
  double monte_carlo = 0.0;
  double stderr_ = 0.0;
  double bound = 0.0;  // allowed |mc - analytic|
  std::int64_t samples = 0;
};

}  // namespace

CommandResult RunValidate(const std::optional<RunConfig>& cfg, const RunOptions& opt) {
  const std::vector<Column> cols{{"check", "1"},       {"analytic", "1"},  {"monte_carlo", "1"},
                                 {"stderr", "1"},      {"z_score", "1"},   {"bound", "1"},
                                 {"pass", "1"},        {"samples", "1"},   {"seed", "1"},
                                 {"schema_version", "1"}};
  CommandResult res{Table("validate", cols), true};
  const std::int64_t n = opt.samples;
  if (n <= 0) return res;
  const McOptions mc{opt.seed, opt.jobs};
  constexpr double kSigmas = 3.0;
  std::vector<Check> checks;

  struct ResidualCase {
    const char* name;
    double s2;
    double r;  // < 0: optimised
    std::optional<double> db;
  };
  const ResidualCase cases[] = {{"residual_s0.05_r0.3_ideal", 0.05, 0.3, std::nullopt},
                                {"residual_s0.13_ropt_20dB", 0.13, -1.0, 20.0},
                                {"residual_s0.25_r1.2_20dB", 0.25, 1.2, 20.0}};
  for (const auto& c : cases) {
    const GkpAncilla anc = c.db ? GkpAncilla::Finite(*c.db) : GkpAncilla::Ideal();
    const double r = c.r >= 0.0 ? c.r : OptimizeSqueezing(NoiseVariance(c.s2), anc).r_opt;
    const QuadratureResiduals exact = ResidualVariances(r, NoiseVariance(c.s2), anc);
    const McResidualResult m = McResidualVariance(r, NoiseVariance(c.s2), anc, n, mc);
    checks.push_back({std::string(c.name) + "_q", exact.q, m.q.variance, m.q.variance_stderr,
                      kSigmas * m.q.variance_stderr, n});
    checks.push_back({std::string(c.name) + "_p", exact.p, m.p.variance, m.p.variance_stderr,
                      kSigmas * m.p.variance_stderr, n});
  }

  ProtocolParams p;
  p.tau_B = FiberTransmittance(10.0);
  const AliceLink links[] = {
      AliceLink::Corrected(OptimizeSqueezing(AwgnVariancePreamp(FiberTransmittance(1.0)), GkpAncilla::Ideal()).sigma_r2),
      AliceLink::PureLoss(FiberTransmittance(1.0))};
  const char* link_names[] = {"mutual_info_LA1_ideal_LB10", "mutual_info_LA1_unamplified_LB10"};
  for (int i = 0; i < 2; ++i) {
    const double exact = MutualInformation(ConditionedStateFor(p, links[i]));
    const McMutualInfoResult m = McProtocolMutualInfo(p, links[i], std::max<std::int64_t>(n, 2), mc);
    checks.push_back({link_names[i], exact, m.mutual_info, m.stderr_, kSigmas * m.stderr_, n});
  }

  {
    // Coverage of the worst-case bound at eps_pe = 1e-2.
    ProtocolParams q;
    q.tau_B = FiberTransmittance(5.0);
    const CovMatrix truth = ConditionedStateFor(q, AliceLink::PureLoss(FiberTransmittance(1.0))).V;
    const double eps = 1e-2;
    const std::int64_t trials = std::clamp<std::int64_t>(n / 100, 1, 10000);
    const McCoverageResult c = McPeCoverage(truth, 100000, eps, trials, mc);
    const double se = std::sqrt(eps * (1.0 - eps) / static_cast<double>(trials));
    // One-sided: only an excess of failures counts.
    checks.push_back({"pe_coverage_eps0.01_m1e5", eps, std::min(c.failure_fraction, eps), se,
                      kSigmas * se, trials});
    checks.back().monte_carlo = c.failure_fraction;
    if (c.failure_fraction < eps) checks.back().bound = INFINITY;
  }

  if (cfg && cfg->fading && !cfg->fading->point_mass() &&
      cfg->compensation.kind == Compensation::kGkp) {
    const FadingConfig& fc = *cfg->fading;
    const GkpAncilla anc = cfg->compensation.Ancilla();
    const CodePolicy policy = cfg->compensation.dynamic
                                  ? CodePolicy::Dynamic(anc)
                                  : CodePolicy::Fixed(anc, cfg->compensation.fixed_r);
    const ResidualTable table(fc, policy, opt.jobs);
    const double exact = MeanResidualVariance(fc, table).value;
    const McEstimate m = McFadingMean(
        [&](double tau) { return table(NoiseVariance(1.0 - tau)).value; }, fc, n, mc);
    checks.push_back({"fading_mean_sigma_r2", exact, m.mean, m.mean_stderr,
                      kSigmas * m.mean_stderr, n});
  }

  for (const Check& c : checks) {
    const double diff = c.monte_carlo - c.analytic;
    const bool pass = std::abs(diff) <= c.bound || (c.bound == INFINITY);
    res.passed = res.passed && pass;
    std::map<std::string, Cell> row;
    row["check"] = c.name;
    row["analytic"] = c.analytic;
    row["monte_carlo"] = c.monte_carlo;
    row["stderr"] = c.stderr_;
    row["z_score"] = c.stderr_ > 0.0 ? Cell(diff / c.stderr_) : Cell();
    row["bound"] = Num(c.bound);
    row["pass"] = pass;
    row["samples"] = c.samples;
    row["seed"] = static_cast<std::int64_t>(opt.seed);
    row["schema_version"] = std::string(kSchemaVersion);
    res.table.AddRow(row);
  }
  return res;
}

}  // namespace gkpqkd::cli
