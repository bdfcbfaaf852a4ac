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

#ifndef DPMH_HARNESS_EXPERIMENT_H_
#define DPMH_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmh/diagnostics/grid_posterior.h"
#include "dpmh/energy_model.h"
#include "dpmh/harness/experiment_config.h"
#include "dpmh/logistic_model.h"
#include "dpmh/privacy.h"
#include "dpmh/sampler.h"

namespace dpmh::harness {

// round(epsilon C / (divisor c_max)), floored at 1.
int64_t DefaultBatchCap(double epsilon, double total_bound, double max_bound,
                        double divisor = kBatchCapDivisorDefault);

// Seed for one sweep cell, hashed from every coordinate of the cell.
uint64_t DeriveCellSeed(uint64_t master_seed, SamplerMode mode, double epsilon,
                        int64_t batch_cap, int64_t replicate);

// Identifier used in metrics files, e.g. "dpfast_eps0.1_K25_r0".
std::string CellId(SamplerMode mode, double epsilon, int64_t batch_cap,
                   int64_t replicate);

struct BuiltModel {
  std::shared_ptr<const EnergyModel> model;
  // Set for logistic models.
  std::shared_ptr<const LogisticRegressionModel> logistic;
  std::optional<LabeledData> holdout;
};

absl::StatusOr<BuiltModel> BuildModel(const ModelSpec& spec);

struct MetricRow {
  std::string metric;
  std::string config_id;
  double value = 0.0;
  // NaN when no standard error applies.
  double std_error = 0.0;
};

// CSV with header metric,config_id,value,stderr.
absl::Status WriteMetricsCsv(const std::string& path,
                             const std::vector<MetricRow>& rows);

struct RunOutcome {
  // Configuration with automatic K and proposal scale filled in.
  ExperimentConfig resolved;
  std::vector<MetricRow> metrics;
  ChainRun chain;
  PrivacyLedger ledger{0.0};
};

// Single experiment. When out_dir is non-empty writes trace.csv, ledger.csv,
// metrics.csv and resolved.cfg there; the files hold whatever was produced
// even when the chain stops with an error, which is then returned.
absl::StatusOr<RunOutcome> RunExperiment(const ExperimentConfig& config,
                                         const std::string& out_dir,
                                         const std::string& config_id = "run");

struct SweepCell {
  std::string config_id;
  SamplerMode mode;
  double epsilon;
  int64_t batch_cap;
  int64_t replicate;
  uint64_t seed;
  absl::Status status;
};

struct SweepOutcome {
  std::vector<SweepCell> cells;
  std::vector<MetricRow> metrics;
  int failures = 0;
};

// Cross product modes x epsilons x K x replicates. Each cell writes into
// out_dir/<config_id>/; the aggregate goes to out_dir/sweep_metrics.csv and
// the cell table to out_dir/sweep_index.csv. Failed cells are recorded and
// the sweep continues.
absl::StatusOr<SweepOutcome> RunSweep(const ExperimentConfig& config,
                                      const std::string& out_dir);

// Kernel estimation for the configured mode and for standard MH on the
// configured discrete states: detailed balance, spectral gaps, their ratio,
// the closed-form lower bound, and the stationary-distribution distance. Writes
// metrics.csv and kernel.csv (from,to,mode,transition,stderr).
absl::StatusOr<std::vector<MetricRow>> RunDiagnose(
    const ExperimentConfig& config, const std::string& out_dir);

// 0 for OK, 2 for configuration errors (InvalidArgument, NotFound,
// FailedPrecondition), 3 for everything else.
int ExitCodeFor(const absl::Status& status);

}  // namespace dpmh::harness

#endif  // DPMH_HARNESS_EXPERIMENT_H_
