//
// Copyright 2026 The dpmh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end: run, sweep, diagnose and data-gen subcommands.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpmh/harness/experiment.h"
#include "dpmh/harness/experiment_config.h"
#include "dpmh/logistic_model.h"
#include "dpmh/mixture_model.h"

namespace {

using dpmh::harness::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  int workers = 1;
};

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return dpmh::harness::ExitCodeFor(status);
}

absl::StatusOr<ExperimentConfig> LoadWithOverrides(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config =
      dpmh::harness::LoadExperimentConfig(flags.config_path);
  if (!config.ok()) return config.status();
  if (!flags.out_dir.empty()) config->output_dir = flags.out_dir;
  if (flags.seed.has_value()) config->sampler.seed = *flags.seed;
  config->workers = flags.workers;
  if (config->output_dir.empty()) {
    return absl::InvalidArgumentError(
        "no output directory: set [output] dir or pass --out");
  }
  return config;
}

int Run(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = LoadWithOverrides(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<dpmh::harness::RunOutcome> outcome =
      dpmh::harness::RunExperiment(*config, config->output_dir);
  if (!outcome.ok()) return Fail(outcome.status());
  std::cout << "wrote " << config->output_dir << " ("
            << outcome->chain.trace.size() << " iterations)\n";
  return 0;
}

int Sweep(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = LoadWithOverrides(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<dpmh::harness::SweepOutcome> outcome =
      dpmh::harness::RunSweep(*config, config->output_dir);
  if (!outcome.ok()) return Fail(outcome.status());
  int exit_code = 0;
  for (const dpmh::harness::SweepCell& cell : outcome->cells) {
    if (cell.status.ok()) continue;
    std::cerr << "cell " << cell.config_id << " failed: " << cell.status
              << "\n";
    if (exit_code == 0) exit_code = dpmh::harness::ExitCodeFor(cell.status);
  }
  std::cout << "swept " << outcome->cells.size() << " cells into "
            << config->output_dir << " (" << outcome->failures << " failed)\n";
  return exit_code;
}

int Diagnose(const CommonFlags& flags) {
  absl::StatusOr<ExperimentConfig> config = LoadWithOverrides(flags);
  if (!config.ok()) return Fail(config.status());
  absl::StatusOr<std::vector<dpmh::harness::MetricRow>> rows =
      dpmh::harness::RunDiagnose(*config, config->output_dir);
  if (!rows.ok()) return Fail(rows.status());
  for (const dpmh::harness::MetricRow& row : *rows) {
    std::cout << row.metric << " = " << row.value << "\n";
  }
  return 0;
}

struct DataGenFlags {
  std::string kind = "mixture";
  int64_t n = 2000;
  uint64_t seed = 7;
  std::string out;
  int dim = 2;
  std::vector<double> theta;
  double bias = 0.0;
};

int DataGen(const DataGenFlags& flags) {
  if (flags.kind == "mixture") {
    absl::StatusOr<std::vector<double>> data =
        dpmh::GenerateMixtureData(flags.n, flags.seed);
    if (!data.ok()) return Fail(data.status());
    absl::Status s = dpmh::WriteMixtureData(flags.out, *data);
    return s.ok() ? 0 : Fail(s);
  }
  if (flags.kind == "logistic") {
    std::vector<double> theta = flags.theta;
    if (theta.empty()) theta.assign(static_cast<std::size_t>(flags.dim), 1.0);
    absl::StatusOr<dpmh::LabeledData> data =
        dpmh::GenerateLogisticData(flags.n, theta, flags.seed, flags.bias);
    if (!data.ok()) return Fail(data.status());
    absl::Status s = dpmh::WriteFeatureCsv(flags.out, *data);
    return s.ok() ? 0 : Fail(s);
  }
  return Fail(absl::InvalidArgumentError(absl::StrCat(
      "--kind must be mixture or logistic, got '", flags.kind, "'")));
}

void AddCommonFlags(CLI::App* command, CommonFlags& flags,
                    std::optional<uint64_t>& seed_holder) {
  command->add_option("--config", flags.config_path, "Experiment config file")
      ->required();
  command->add_option("--out", flags.out_dir,
                      "Output directory (overrides [output] dir)");
  command->add_option("--seed", seed_holder,
                      "Master seed (overrides [sampler] seed)");
  command->add_option("--workers", flags.workers, "Parallel sweep cells")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private minibatch Metropolis-Hastings"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::optional<uint64_t> seed;
  CLI::App* run = app.add_subcommand("run", "Run one experiment");
  CLI::App* sweep =
      app.add_subcommand("sweep", "Run the mode x epsilon x K grid");
  CLI::App* diagnose = app.add_subcommand(
      "diagnose", "Kernel, detailed-balance and spectral-gap suite");
  for (CLI::App* command : {run, sweep, diagnose}) {
    AddCommonFlags(command, flags, seed);
  }

  DataGenFlags gen;
  CLI::App* data_gen =
      app.add_subcommand("data-gen", "Write a synthetic dataset");
  data_gen->add_option("--kind", gen.kind, "mixture or logistic");
  data_gen->add_option("--n", gen.n, "Number of points");
  data_gen->add_option("--seed", gen.seed, "Data seed");
  data_gen->add_option("--out", gen.out, "Output file")->required();
  data_gen->add_option("--dim", gen.dim, "Logistic feature dimension");
  data_gen->add_option("--theta", gen.theta, "Logistic generating parameter")
      ->delimiter(',');
  data_gen->add_option("--bias", gen.bias, "Offset added to every feature");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  flags.seed = seed;

  if (run->parsed()) return Run(flags);
  if (sweep->parsed()) return Sweep(flags);
  if (diagnose->parsed()) return Diagnose(flags);
  return DataGen(gen);
}
