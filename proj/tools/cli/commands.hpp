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

#ifndef GKPQKD_TOOLS_CLI_COMMANDS_HPP_
#define GKPQKD_TOOLS_CLI_COMMANDS_HPP_

#include <cstdint>
#include <optional>

#include "config.hpp"
#include "gkpqkd/security.hpp"
#include "table.hpp"

namespace gkpqkd::cli {

struct RunOptions {
  std::uint64_t seed = 1;
  std::int64_t samples = 1000000;
  int jobs = 1;
};

struct CommandResult {
  Table table;
  bool passed = true;  // false only for a failed validate run
};

CommandResult RunResidual(const RunConfig& cfg, const RunOptions& opt);
CommandResult RunRate(const RunConfig& cfg, const RunOptions& opt);
CommandResult RunFading(const RunConfig& cfg, const RunOptions& opt);
// `cfg` is optional; with a fading block the fading mean is checked too.
CommandResult RunValidate(const std::optional<RunConfig>& cfg, const RunOptions& opt);

// Residual variance of Alice's compensated arm over `length_km`,
// concatenated over `layers` equal segments. Also reports the optimised
// squeezing of one segment.
struct ArmResidual {
  double sigma2 = 0.0;    // uncorrected noise of the whole arm
  double sigma_r2 = 0.0;  // after correction
  double r_opt = 0.0;
  int layers = 1;
};
ArmResidual ComputeArmResidual(const RunConfig& cfg, double length_km, int layers);

// Key rate of the fiber scenario at one point. Non-finite when the
// worst-case CM is unphysical.
struct RatePoint {
  RateReport report;
  double rate = 0.0;
  double sigma_r2 = 0.0;
  bool physical = true;
};
RatePoint ComputeRatePoint(const RunConfig& cfg, double l_a, double l_b,
                           const std::optional<FiniteSizeParams>& fs);

// Outermost distance along `search.axis` with a positive rate; 0 if the
// rate is not positive at search.min_km.
double MaxSecureDistance(const RunConfig& cfg, const SearchConfig& search, double fixed_km,
                         const std::optional<FiniteSizeParams>& fs);

}  // namespace gkpqkd::cli

#endif  // GKPQKD_TOOLS_CLI_COMMANDS_HPP_
