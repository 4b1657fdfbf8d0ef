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

#ifndef GKPQKD_TOOLS_CLI_CONFIG_HPP_
#define GKPQKD_TOOLS_CLI_CONFIG_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gkpqkd/channels.hpp"
#include "gkpqkd/fading.hpp"
#include "gkpqkd/finite_size.hpp"
#include "gkpqkd/gkp_codec.hpp"

namespace gkpqkd::cli {

// Anything wrong with the config file or flags. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario { kFiber, kFreeSpace };

// How Alice's lossy arm is compensated before the relay.
enum class Compensation {
  kNone,    // unamplified pure loss
  kPreamp,  // phase-insensitive pre-amplification only
  kGkp,     // pre-amplification followed by GKP correction
  kQt,      // teleportation over a TMSV resource followed by GKP correction
};

struct CompensationConfig {
  Compensation kind = Compensation::kGkp;
  std::optional<double> gkp_squeezing_db = 20.0;  // nullopt: ideal ancilla
  double tmsv_squeezing_db = 20.0;
  double segment_length_km = 0.0;  // > 0 splits L_A into concatenated segments
  int layers = 1;                  // used when segment_length_km == 0
  bool dynamic = true;             // re-optimise r per realisation (fading)
  double fixed_r = 0.0;

  GkpAncilla Ancilla() const {
    return gkp_squeezing_db ? GkpAncilla::Finite(*gkp_squeezing_db) : GkpAncilla::Ideal();
  }
  // Number of concatenated codes for a link of `length_km`.
  int LayersFor(double length_km) const;
};

struct SweepConfig {
  std::string axis;
  std::vector<double> values;  // expanded sweep points, in order
  int points = 0;              // for axis "tau": size of the PDF grid
};

struct SearchConfig {
  std::string axis;  // "L_A" or "L_B"
  double min_km = 1e-3;
  double max_km = 1000.0;
  double scan_step_km = 1.0;
  double resolution_km = 0.01;
};

struct RunConfig {
  std::string path;
  std::string label;
  Scenario scenario = Scenario::kFiber;
  ProtocolParams protocol;
  CompensationConfig compensation;
  std::optional<FiniteSizeParams> finite_size;  // nullopt: asymptotic
  std::optional<FadingConfig> fading;
  SweepConfig sweep;
  std::optional<SearchConfig> search;
};

// Parses and validates a YAML config. Throws ConfigError.
RunConfig LoadConfig(const std::string& path);
RunConfig ParseConfig(const std::string& text, const std::string& origin = "<string>");

const char* ToString(Scenario s);
const char* ToString(Compensation c);

}  // namespace gkpqkd::cli

#endif  // GKPQKD_TOOLS_CLI_CONFIG_HPP_
