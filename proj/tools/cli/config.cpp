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

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gkpqkd/errors.hpp"

namespace gkpqkd::cli {
namespace {

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void CheckKeys(const YAML::Node& node, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!node.IsMap()) Fail(where, "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) Fail(where, "unknown key '" + key + "'");
  }
}

double GetDouble(const YAML::Node& node, const std::string& key, const std::string& where,
                 double fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    const double x = v.as<double>();
    if (!std::isfinite(x)) Fail(where + "." + key, "must be finite");
    return x;
  } catch (const YAML::Exception&) {
    Fail(where + "." + key, "expected a number");
  }
}

int GetInt(const YAML::Node& node, const std::string& key, const std::string& where,
           int fallback) {
  const double x = GetDouble(node, key, where, fallback);
  if (x != std::floor(x) || std::abs(x) > 1e9) Fail(where + "." + key, "expected an integer");
  return static_cast<int>(x);
}

std::string GetString(const YAML::Node& node, const std::string& key, const std::string& where,
                      const std::string& fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  if (!v.IsScalar()) Fail(where + "." + key, "expected a string");
  return v.as<std::string>();
}

ProtocolParams ParseProtocol(const YAML::Node& node) {
  ProtocolParams p;
  if (!node) return p;
  const std::string w = "protocol";
  CheckKeys(node, w,
            {"signal_wavelength", "modulation_variance", "alice_modulation_variance",
             "bob_modulation_variance", "reconciliation_efficiency", "smf_attenuation_coefficient",
             "thermal_noise_photon_mean", "alice_distance", "bob_distance"});
  p.lambda_nm = GetDouble(node, "signal_wavelength", w, p.lambda_nm);
  const double both = GetDouble(node, "modulation_variance", w, p.sigma2_A);
  p.sigma2_A = GetDouble(node, "alice_modulation_variance", w, both);
  p.sigma2_B = GetDouble(node, "bob_modulation_variance", w, both);
  p.beta0 = GetDouble(node, "reconciliation_efficiency", w, p.beta0);
  p.alpha0 = GetDouble(node, "smf_attenuation_coefficient", w, p.alpha0);
  p.n_bar = GetDouble(node, "thermal_noise_photon_mean", w, p.n_bar);
  p.L_A = GetDouble(node, "alice_distance", w, p.L_A);
  p.L_B = GetDouble(node, "bob_distance", w, p.L_B);
  return p;
}

CompensationConfig ParseCompensation(const YAML::Node& node) {
  CompensationConfig c;
  if (!node) return c;
  const std::string w = "compensation";
  CheckKeys(node, w,
            {"kind", "gkp_squeezing", "tmsv_squeezing", "segment_length", "layers", "code_policy",
             "squeezing_r"});
  const std::string kind = GetString(node, "kind", w, "gkp");
  if (kind == "none") {
    c.kind = Compensation::kNone;
  } else if (kind == "preamp") {
    c.kind = Compensation::kPreamp;
  } else if (kind == "gkp") {
    c.kind = Compensation::kGkp;
  } else if (kind == "qt") {
    c.kind = Compensation::kQt;
  } else {
    Fail(w + ".kind", "expected none, preamp, gkp or qt");
  }
  if (node["gkp_squeezing"]) {
    if (GetString(node, "gkp_squeezing", w, "") == "ideal") {
      c.gkp_squeezing_db = std::nullopt;
    } else {
      c.gkp_squeezing_db = GetDouble(node, "gkp_squeezing", w, 20.0);
      if (!(*c.gkp_squeezing_db > 0.0)) Fail(w + ".gkp_squeezing", "must be > 0 dB or 'ideal'");
    }
  }
  c.tmsv_squeezing_db = GetDouble(node, "tmsv_squeezing", w, c.tmsv_squeezing_db);
  if (c.tmsv_squeezing_db < 0.0) Fail(w + ".tmsv_squeezing", "must be >= 0 dB");
  c.segment_length_km = GetDouble(node, "segment_length", w, 0.0);
  if (c.segment_length_km < 0.0) Fail(w + ".segment_length", "must be >= 0");
  c.layers = GetInt(node, "layers", w, 1);
  if (c.layers < 1) Fail(w + ".layers", "must be >= 1");
  if (node["segment_length"] && node["layers"]) {
    Fail(w, "give either segment_length or layers, not both");
  }
  const std::string policy = GetString(node, "code_policy", w, "dynamic");
  if (policy != "dynamic" && policy != "fixed") Fail(w + ".code_policy", "expected dynamic or fixed");
  c.dynamic = policy == "dynamic";
  c.fixed_r = GetDouble(node, "squeezing_r", w, 0.0);
  if (c.fixed_r < 0.0) Fail(w + ".squeezing_r", "must be >= 0");
  if (!c.dynamic && !node["squeezing_r"]) Fail(w, "code_policy fixed needs squeezing_r");
  return c;
}

std::optional<FiniteSizeParams> ParseFiniteSize(const YAML::Node& node) {
  if (!node) return std::nullopt;
  const std::string w = "finite_size";
  if (node.IsScalar()) {
    if (node.as<std::string>() == "asymptotic") return std::nullopt;
    Fail(w, "expected a mapping or 'asymptotic'");
  }
  CheckKeys(node, w,
            {"total_pulse", "pe_signals", "digitalization", "ec_success_probability",
             "eps_correctness", "smoothing_parameter", "hash_parameter", "pe_error_probability"});
  FiniteSizeParams fs;
  fs.N = GetDouble(node, "total_pulse", w, fs.N);
  fs.m_pe = GetDouble(node, "pe_signals", w, 0.1 * fs.N);
  fs.d = GetInt(node, "digitalization", w, fs.d);
  fs.p_ec = GetDouble(node, "ec_success_probability", w, fs.p_ec);
  fs.eps_cor = GetDouble(node, "eps_correctness", w, fs.eps_cor);
  fs.eps_s = GetDouble(node, "smoothing_parameter", w, fs.eps_s);
  fs.eps_h = GetDouble(node, "hash_parameter", w, fs.eps_h);
  fs.eps_pe = GetDouble(node, "pe_error_probability", w, fs.eps_pe);
  try {
    fs.Validate();
  } catch (const InvalidArgument& e) {
    Fail(w, e.what());
  }
  if (fs.m_pe < kMinPeSamples) Fail(w + ".pe_signals", "must be >= 1e4");
  return fs;
}

std::optional<FadingConfig> ParseFading(const YAML::Node& node) {
  if (!node) return std::nullopt;
  const std::string w = "fading";
  CheckKeys(node, w,
            {"transmittance_max", "shape_parameter", "scale_parameter", "beam_wander_variance",
             "aperture_radius", "beam_waist", "distance", "pointing_error", "label"});
  FadingConfig f;
  f.tau0 = GetDouble(node, "transmittance_max", w, f.tau0);
  f.gamma0 = GetDouble(node, "shape_parameter", w, f.gamma0);
  f.r0 = GetDouble(node, "scale_parameter", w, f.r0);
  f.sigma_bw2 = GetDouble(node, "beam_wander_variance", w, f.sigma_bw2);
  f.a_R = GetDouble(node, "aperture_radius", w, f.a_R);
  f.w0 = GetDouble(node, "beam_waist", w, f.w0);
  f.L_A = GetDouble(node, "distance", w, f.L_A);
  f.pointing_urad = GetDouble(node, "pointing_error", w, f.pointing_urad);
  f.label = GetString(node, "label", w, "");
  try {
    f.Validate();
  } catch (const InvalidArgument& e) {
    Fail(w, e.what());
  }
  return f;
}

// Sweep points must be usable on their axis.
void CheckSweepValues(const SweepConfig& s, const std::string& w) {
  for (double v : s.values) {
    if (!std::isfinite(v) || v < 0.0) Fail(w + ".values", "must be finite and >= 0");
    if (s.axis == "N" && !(v > 0.0)) Fail(w + ".values", "block sizes must be > 0");
    if (s.axis == "C" && (v < 1.0 || v != std::floor(v))) {
      Fail(w + ".values", "layer counts must be integers >= 1");
    }
  }
}

SweepConfig ParseSweep(const YAML::Node& node) {
  SweepConfig s;
  const std::string w = "sweep";
  if (!node) Fail(w, "missing");
  CheckKeys(node, w, {"axis", "values", "start", "stop", "step", "points", "scale"});
  s.axis = GetString(node, "axis", w, "");
  static const std::set<std::string> kAxes{"L_A", "L_B", "N", "C", "tau"};
  if (!kAxes.count(s.axis)) Fail(w + ".axis", "expected one of L_A, L_B, N, C, tau");
  if (s.axis == "tau") {
    for (const char* k : {"values", "start", "stop", "step", "scale"}) {
      if (node[k]) Fail(w, std::string("axis tau takes only points, not ") + k);
    }
    s.points = GetInt(node, "points", w, 2000);
    if (s.points < 0) Fail(w + ".points", "must be >= 0");
    return s;
  }
  if (node["values"]) {
    for (const char* k : {"start", "stop", "step", "points", "scale"}) {
      if (node[k]) Fail(w, std::string("give either values or a range, not values and ") + k);
    }
    if (!node["values"].IsSequence()) Fail(w + ".values", "expected a list");
    for (const auto& v : node["values"]) {
      try {
        s.values.push_back(v.as<double>());
      } catch (const YAML::Exception&) {
        Fail(w + ".values", "expected numbers");
      }
    }
    CheckSweepValues(s, w);
    return s;
  }
  if (!node["start"] || !node["stop"]) Fail(w, "needs values, or start and stop");
  if (node["step"] && node["points"]) Fail(w, "give either step or points, not both");
  const double start = GetDouble(node, "start", w, 0.0);
  const double stop = GetDouble(node, "stop", w, 0.0);
  const std::string scale = GetString(node, "scale", w, "linear");
  if (scale != "linear" && scale != "log") Fail(w + ".scale", "expected linear or log");
  if (node["step"]) {
    if (scale == "log") Fail(w, "log scale takes points, not step");
    const double step = GetDouble(node, "step", w, 1.0);
    if (!(step > 0.0)) Fail(w + ".step", "must be > 0");
    if (stop < start) return s;
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (n > 10000000) Fail(w, "too many sweep points");
    for (long i = 0; i < n; ++i) s.values.push_back(start + static_cast<double>(i) * step);
    CheckSweepValues(s, w);
    return s;
  }
  if (!node["points"]) Fail(w, "a range needs step or points");
  const int points = GetInt(node, "points", w, 0);
  if (points < 0) Fail(w + ".points", "must be >= 0");
  if (stop < start) return s;
  if (scale == "log" && !(start > 0.0)) Fail(w + ".start", "log scale needs start > 0");
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    s.values.push_back(scale == "log" ? start * std::pow(stop / start, t)
                                      : start + (stop - start) * t);
  }
  CheckSweepValues(s, w);
  return s;
}

std::optional<SearchConfig> ParseSearch(const YAML::Node& node) {
  if (!node) return std::nullopt;
  const std::string w = "search";
  CheckKeys(node, w, {"axis", "min", "max", "scan_step", "resolution"});
  SearchConfig s;
  s.axis = GetString(node, "axis", w, "L_B");
  if (s.axis != "L_A" && s.axis != "L_B") Fail(w + ".axis", "expected L_A or L_B");
  s.min_km = GetDouble(node, "min", w, s.min_km);
  s.max_km = GetDouble(node, "max", w, s.max_km);
  s.scan_step_km = GetDouble(node, "scan_step", w, s.scan_step_km);
  s.resolution_km = GetDouble(node, "resolution", w, s.resolution_km);
  if (!(s.min_km >= 0.0 && s.max_km > s.min_km)) Fail(w, "need 0 <= min < max");
  if (!(s.scan_step_km > 0.0 && s.resolution_km > 0.0)) Fail(w, "scan_step and resolution must be > 0");
  return s;
}

}  // namespace

int CompensationConfig::LayersFor(double length_km) const {
  if (segment_length_km > 0.0) {
    return std::max(1, static_cast<int>(std::lround(length_km / segment_length_km)));
  }
  return layers;
}

RunConfig ParseConfig(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
  RunConfig cfg;
  cfg.path = origin;
  try {
    CheckKeys(root, "config",
              {"label", "scenario", "protocol", "compensation", "finite_size", "fading", "sweep",
               "search"});
    cfg.label = GetString(root, "label", "config", "");
    const std::string scenario = GetString(root, "scenario", "config", "fiber");
    if (scenario == "fiber") {
      cfg.scenario = Scenario::kFiber;
    } else if (scenario == "free_space") {
      cfg.scenario = Scenario::kFreeSpace;
    } else {
      Fail("scenario", "expected fiber or free_space");
    }
    cfg.protocol = ParseProtocol(root["protocol"]);
    try {
      cfg.protocol.Validate();
    } catch (const InvalidArgument& e) {
      Fail("protocol", e.what());
    }
    cfg.compensation = ParseCompensation(root["compensation"]);
    cfg.finite_size = ParseFiniteSize(root["finite_size"]);
    cfg.fading = ParseFading(root["fading"]);
    cfg.sweep = ParseSweep(root["sweep"]);
    cfg.search = ParseSearch(root["search"]);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (cfg.scenario == Scenario::kFreeSpace && !cfg.fading) {
    throw ConfigError(origin + ": scenario free_space needs a fading block");
  }
  if (cfg.scenario == Scenario::kFiber && cfg.fading) {
    throw ConfigError(origin + ": fading block given for scenario fiber");
  }
  if (cfg.search && cfg.search->axis == cfg.sweep.axis) {
    throw ConfigError(origin + ": search axis must differ from the sweep axis");
  }
  return cfg;
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str(), path);
}

const char* ToString(Scenario s) { return s == Scenario::kFiber ? "fiber" : "free_space"; }

const char* ToString(Compensation c) {
  switch (c) {
    case Compensation::kNone:
      return "none";
    case Compensation::kPreamp:
      return "preamp";
    case Compensation::kGkp:
      return "gkp";
    case Compensation::kQt:
      return "qt";
  }
  return "?";
}

}  // namespace gkpqkd::cli
