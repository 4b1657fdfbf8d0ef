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

// gkpqkd: residual, rate, fading and validate subcommands.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "commands.hpp"
#include "config.hpp"
#include "gkpqkd/errors.hpp"

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string config;
  std::string output = "-";
  std::string format = "csv";
  std::uint64_t seed = 1;
  std::int64_t samples = 1000000;
  int jobs = 1;
};

void AddFlags(CLI::App* cmd, Flags& f, bool config_required) {
  auto* c = cmd->add_option("--config", f.config, "YAML run configuration");
  if (config_required) c->required();
  cmd->add_option("--output", f.output, "output file, '-' for stdout");
  cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", f.seed, "Monte Carlo seed");
  cmd->add_option("--samples", f.samples, "Monte Carlo sample budget")->check(CLI::NonNegativeNumber);
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::Range(1, 4096));
}

int Emit(const gkpqkd::cli::Table& table, const Flags& f) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (f.output != "-") {
    file.open(f.output, std::ios::binary | std::ios::trunc);
    if (!file) {
      std::cerr << "error: cannot write '" << f.output << "'\n";
      return kExitConfig;
    }
    out = &file;
  }
  if (f.format == "json") {
    table.WriteJson(*out);
  } else {
    table.WriteCsv(*out);
  }
  out->flush();
  if (!*out) {
    std::cerr << "error: write to '" << f.output << "' failed\n";
    return kExitConfig;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CV-MDI-QKD key rates with GKP-corrected links"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* residual = app.add_subcommand("residual", "GKP residual noise versus distance or layers");
  CLI::App* rate = app.add_subcommand("rate", "asymptotic or composable key rate sweeps");
  CLI::App* fading = app.add_subcommand("fading", "free-space fading statistics and averaged rates");
  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo oracle checks");
  AddFlags(residual, flags, true);
  AddFlags(rate, flags, true);
  AddFlags(fading, flags, true);
  AddFlags(validate, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  using namespace gkpqkd::cli;
  const RunOptions opt{flags.seed, flags.samples, flags.jobs};
  try {
    std::optional<RunConfig> cfg;
    if (!flags.config.empty()) cfg = LoadConfig(flags.config);
    std::optional<CommandResult> result;
    if (residual->parsed()) result = RunResidual(*cfg, opt);
    if (rate->parsed()) result = RunRate(*cfg, opt);
    if (fading->parsed()) result = RunFading(*cfg, opt);
    if (validate->parsed()) result = RunValidate(cfg, opt);
    auto& meta = result->table.meta();
    meta["config"] = flags.config;
    meta["seed"] = static_cast<std::int64_t>(flags.seed);
    meta["samples"] = flags.samples;
    meta["version"] = std::string(kToolVersion);
    const int code = Emit(result->table, flags);
    if (code != kExitOk) return code;
    if (!result->passed) {
      std::cerr << "validation failed\n";
      return kExitValidation;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gkpqkd::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}
