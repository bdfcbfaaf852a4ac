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

#ifndef DPMH_HARNESS_EXPERIMENT_CONFIG_H_
#define DPMH_HARNESS_EXPERIMENT_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"
#include "dpmh/mixture_model.h"
#include "dpmh/sampler.h"
#include "dpmh/sampler_config.h"

namespace dpmh::harness {

enum class ModelKind { kMixture, kLogistic };

struct ModelSpec {
  ModelKind kind = ModelKind::kMixture;
  double temperature = 1.0;
  BoxDomain domain;

  // Mixture: generated from (n, data_seed, params) unless data_path is set.
  int64_t n = 2000;
  uint64_t data_seed = 7;
  MixtureParams mixture;
  std::string data_path;

  // Logistic: loaded from features_path, or synthesized from theta_true when
  // no path is given.
  std::string features_path;
  std::string holdout_path;
  Vector theta_true;
  int64_t holdout_n = 0;
  double feature_bias = 0.0;
};

// Divisor applied to epsilon C / c_max when choosing K automatically.
inline constexpr double kBatchCapDivisorDefault = 6.0;

struct ExperimentConfig {
  ModelSpec model;
  SamplerConfig sampler;

  bool auto_batch_cap = false;
  double batch_cap_divisor = kBatchCapDivisorDefault;
  bool auto_proposal_scale = false;
  TuningOptions tuning;
  std::optional<Vector> initial;

  double burn_in = 0.2;
  int64_t grid_resolution = 50;
  // Empty means "use the model domain".
  Vector grid_lower;
  Vector grid_upper;
  // Slack term of advanced composition. Defaults to the per-step delta.
  std::optional<double> delta_slack;

  std::vector<SamplerMode> sweep_modes;
  std::vector<double> sweep_epsilons;
  // Empty means automatic K per epsilon.
  std::vector<int64_t> sweep_batch_caps;
  int64_t sweep_replicates = 1;

  std::vector<Vector> diagnose_states;
  int64_t diagnose_trials = 100000;

  std::string output_dir;
  int workers = 1;
};

// Parses the INI-style configuration text. Relative paths are resolved
// against `base_dir` when it is non-empty.
absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    std::string_view text, const std::string& base_dir = "");
absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path);

// Renders a configuration that parses back to an equivalent one. Numbers use
// shortest round-trip form.
std::string SerializeExperimentConfig(const ExperimentConfig& config);

}  // namespace dpmh::harness

#endif  // DPMH_HARNESS_EXPERIMENT_CONFIG_H_
