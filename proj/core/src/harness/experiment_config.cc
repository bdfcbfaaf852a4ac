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

#include "dpmh/harness/experiment_config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dpmh/csv.h"
#include "dpmh/status_macros.h"

namespace dpmh::harness {
namespace {

namespace pt = boost::property_tree;

std::vector<std::string_view> Split(std::string_view text, char separator) {
  std::vector<std::string_view> parts;
  while (true) {
    const std::size_t at = text.find(separator);
    parts.push_back(text.substr(0, at));
    if (at == std::string_view::npos) return parts;
    text.remove_prefix(at + 1);
  }
}

const std::set<std::string>& AllowedKeys(const std::string& section) {
  static const auto* const kKeys =
      new std::map<std::string, std::set<std::string>>{
          {"model",
           {"type", "temperature", "domain_lower", "domain_upper", "n",
            "data_seed", "theta1", "theta2", "sigma_x2", "data", "features",
            "holdout", "theta_true", "holdout_n", "bias"}},
          {"sampler",
           {"mode", "lambda", "batch_cap", "batch_cap_divisor", "epsilon",
            "delta", "proposal_scale", "iters", "seed", "initial"}},
          {"tuning", {"target", "tolerance", "steps", "block"}},
          {"metrics",
           {"burn_in", "grid_resolution", "grid_lower", "grid_upper",
            "delta_slack"}},
          {"sweep", {"modes", "epsilons", "batch_caps", "replicates"}},
          {"diagnose", {"states", "trials"}},
          {"output", {"dir"}},
      };
  static const std::set<std::string> kNone;
  auto it = kKeys->find(section);
  return it == kKeys->end() ? kNone : it->second;
}

// Reads typed values out of the parsed tree and reports errors with the
// section.key they came from.
class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> Get(const std::string& section,
                                 const std::string& key) const {
    auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return std::string(TrimWhitespace(*v));
  }

  absl::Status Double(const std::string& section, const std::string& key,
                      double& out) const {
    std::optional<std::string> v = Get(section, key);
    if (!v) return absl::OkStatus();
    absl::StatusOr<double> parsed = ParseDouble(*v);
    if (!parsed.ok()) return Error(section, key, parsed.status());
    out = *parsed;
    return absl::OkStatus();
  }

  absl::Status Int(const std::string& section, const std::string& key,
                   int64_t& out) const {
    std::optional<std::string> v = Get(section, key);
    if (!v) return absl::OkStatus();
    absl::StatusOr<long long> parsed = ParseInt(*v);
    if (!parsed.ok()) return Error(section, key, parsed.status());
    out = *parsed;
    return absl::OkStatus();
  }

  absl::Status Unsigned(const std::string& section, const std::string& key,
                        uint64_t& out) const {
    std::optional<std::string> v = Get(section, key);
    if (!v) return absl::OkStatus();
    uint64_t value = 0;
    const auto [ptr, ec] =
        std::from_chars(v->data(), v->data() + v->size(), value);
    if (v->empty() || ec != std::errc() || ptr != v->data() + v->size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "[", section, "] ", key, ": not a nonnegative integer: '", *v, "'"));
    }
    out = value;
    return absl::OkStatus();
  }

  absl::Status DoubleList(const std::string& section, const std::string& key,
                          std::vector<double>& out) const {
    std::optional<std::string> v = Get(section, key);
    if (!v) return absl::OkStatus();
    absl::StatusOr<std::vector<double>> parsed = ParseList(*v);
    if (!parsed.ok()) return Error(section, key, parsed.status());
    out = *std::move(parsed);
    return absl::OkStatus();
  }

  static absl::StatusOr<std::vector<double>> ParseList(std::string_view text) {
    std::vector<double> values;
    for (std::string_view field : Split(text, ',')) {
      ASSIGN_OR_RETURN(double value, ParseDouble(field));
      values.push_back(value);
    }
    return values;
  }

 private:
  static absl::Status Error(const std::string& section, const std::string& key,
                            const absl::Status& cause) {
    return absl::InvalidArgumentError(
        absl::StrCat("[", section, "] ", key, ": ", cause.message()));
  }

  const pt::ptree& tree_;
};

std::string ResolvePath(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

std::string JoinDoubles(const std::vector<double>& values) {
  return absl::StrJoin(values, ",", [](std::string* out, double v) {
    out->append(FormatDouble(v));
  });
}

absl::Status Validate(const ExperimentConfig& config) {
  const ModelSpec& model = config.model;
  if (model.domain.lower.size() != model.domain.upper.size()) {
    return absl::InvalidArgumentError(
        "[model] domain_lower and domain_upper differ in length");
  }
  if (model.kind == ModelKind::kLogistic && model.domain.lower.empty()) {
    return absl::InvalidArgumentError(
        "[model] logistic models need domain_lower and domain_upper");
  }
  if (model.kind == ModelKind::kLogistic && model.features_path.empty() &&
      model.theta_true.empty()) {
    return absl::InvalidArgumentError(
        "[model] logistic models need either features or theta_true");
  }
  if (!(config.burn_in >= 0.0 && config.burn_in < 1.0)) {
    return absl::InvalidArgumentError("[metrics] burn_in must lie in [0, 1)");
  }
  if (config.grid_resolution < 1) {
    return absl::InvalidArgumentError(
        "[metrics] grid_resolution must be at least 1");
  }
  if (config.grid_lower.size() != config.grid_upper.size()) {
    return absl::InvalidArgumentError(
        "[metrics] grid_lower and grid_upper differ in length");
  }
  if (config.delta_slack.has_value() &&
      !(*config.delta_slack > 0.0 && *config.delta_slack < 1.0)) {
    return absl::InvalidArgumentError(
        "[metrics] delta_slack must lie in (0, 1)");
  }
  if (!(config.batch_cap_divisor > 0.0)) {
    return absl::InvalidArgumentError(
        "[sampler] batch_cap_divisor must be positive");
  }
  if (config.sweep_replicates < 1) {
    return absl::InvalidArgumentError("[sweep] replicates must be at least 1");
  }
  for (int64_t k : config.sweep_batch_caps) {
    if (k < 0) {
      return absl::InvalidArgumentError(
          "[sweep] batch_caps must be nonnegative");
    }
  }
  if (config.diagnose_trials < 1) {
    return absl::InvalidArgumentError("[diagnose] trials must be at least 1");
  }
  if (config.tuning.block_steps < 1 ||
      config.tuning.total_steps < config.tuning.block_steps) {
    return absl::InvalidArgumentError(
        "[tuning] needs block >= 1 and steps >= block");
  }
  // Automatic values are filled in later; validate the rest now.
  SamplerConfig sampler = config.sampler;
  if (config.auto_batch_cap) sampler.batch_cap = 1;
  if (config.auto_proposal_scale) sampler.proposal_scale = 1.0;
  return sampler.Validate();
}

}  // namespace

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    std::string_view text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config line ", e.line(), ": ", e.message()));
  }
  for (const auto& [section, body] : tree) {
    const std::set<std::string>& allowed = AllowedKeys(section);
    if (allowed.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config section [", section, "]"));
    }
    if (!body.data().empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("key '", section, "' outside any section"));
    }
    for (const auto& [key, unused] : body) {
      if (!allowed.contains(key)) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown key '", key, "' in [", section, "]"));
      }
    }
  }

  Reader r(tree);
  ExperimentConfig config;
  ModelSpec& model = config.model;

  const std::string type = r.Get("model", "type").value_or("mixture");
  if (type == "mixture") {
    model.kind = ModelKind::kMixture;
  } else if (type == "logistic") {
    model.kind = ModelKind::kLogistic;
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "[model] type must be mixture or logistic, got '", type, "'"));
  }
  RETURN_IF_ERROR(r.Double("model", "temperature", model.temperature));
  RETURN_IF_ERROR(r.DoubleList("model", "domain_lower", model.domain.lower));
  RETURN_IF_ERROR(r.DoubleList("model", "domain_upper", model.domain.upper));
  if (model.kind == ModelKind::kMixture && model.domain.lower.empty() &&
      model.domain.upper.empty()) {
    model.domain.lower = {-kMixtureParamLimit, -kMixtureParamLimit};
    model.domain.upper = {kMixtureParamLimit, kMixtureParamLimit};
  }
  RETURN_IF_ERROR(r.Int("model", "n", model.n));
  RETURN_IF_ERROR(r.Unsigned("model", "data_seed", model.data_seed));
  RETURN_IF_ERROR(r.Double("model", "theta1", model.mixture.theta1));
  RETURN_IF_ERROR(r.Double("model", "theta2", model.mixture.theta2));
  RETURN_IF_ERROR(r.Double("model", "sigma_x2", model.mixture.sigma_x2));
  model.data_path = ResolvePath(r.Get("model", "data").value_or(""), base_dir);
  model.features_path =
      ResolvePath(r.Get("model", "features").value_or(""), base_dir);
  model.holdout_path =
      ResolvePath(r.Get("model", "holdout").value_or(""), base_dir);
  RETURN_IF_ERROR(r.DoubleList("model", "theta_true", model.theta_true));
  RETURN_IF_ERROR(r.Int("model", "holdout_n", model.holdout_n));
  RETURN_IF_ERROR(r.Double("model", "bias", model.feature_bias));

  SamplerConfig& sampler = config.sampler;
  if (std::optional<std::string> mode = r.Get("sampler", "mode")) {
    ASSIGN_OR_RETURN(sampler.mode, ParseMode(*mode));
  }
  RETURN_IF_ERROR(r.Double("sampler", "lambda", sampler.lambda));
  if (r.Get("sampler", "batch_cap") == "auto") {
    config.auto_batch_cap = true;
  } else {
    RETURN_IF_ERROR(r.Int("sampler", "batch_cap", sampler.batch_cap));
  }
  RETURN_IF_ERROR(
      r.Double("sampler", "batch_cap_divisor", config.batch_cap_divisor));
  RETURN_IF_ERROR(r.Double("sampler", "epsilon", sampler.epsilon));
  RETURN_IF_ERROR(r.Double("sampler", "delta", sampler.delta));
  if (r.Get("sampler", "proposal_scale") == "auto") {
    config.auto_proposal_scale = true;
  } else {
    RETURN_IF_ERROR(
        r.Double("sampler", "proposal_scale", sampler.proposal_scale));
  }
  RETURN_IF_ERROR(r.Int("sampler", "iters", sampler.iters));
  RETURN_IF_ERROR(r.Unsigned("sampler", "seed", sampler.seed));
  if (r.Get("sampler", "initial")) {
    Vector initial;
    RETURN_IF_ERROR(r.DoubleList("sampler", "initial", initial));
    config.initial = std::move(initial);
  }

  RETURN_IF_ERROR(
      r.Double("tuning", "target", config.tuning.target_acceptance));
  RETURN_IF_ERROR(r.Double("tuning", "tolerance", config.tuning.tolerance));
  RETURN_IF_ERROR(r.Int("tuning", "steps", config.tuning.total_steps));
  RETURN_IF_ERROR(r.Int("tuning", "block", config.tuning.block_steps));

  RETURN_IF_ERROR(r.Double("metrics", "burn_in", config.burn_in));
  RETURN_IF_ERROR(r.Int("metrics", "grid_resolution", config.grid_resolution));
  RETURN_IF_ERROR(r.DoubleList("metrics", "grid_lower", config.grid_lower));
  RETURN_IF_ERROR(r.DoubleList("metrics", "grid_upper", config.grid_upper));
  if (r.Get("metrics", "delta_slack")) {
    double slack = 0.0;
    RETURN_IF_ERROR(r.Double("metrics", "delta_slack", slack));
    config.delta_slack = slack;
  }

  if (std::optional<std::string> modes = r.Get("sweep", "modes")) {
    for (std::string_view name : Split(*modes, ',')) {
      ASSIGN_OR_RETURN(SamplerMode mode, ParseMode(TrimWhitespace(name)));
      config.sweep_modes.push_back(mode);
    }
  }
  RETURN_IF_ERROR(r.DoubleList("sweep", "epsilons", config.sweep_epsilons));
  if (std::optional<std::string> caps = r.Get("sweep", "batch_caps")) {
    for (std::string_view field : Split(*caps, ',')) {
      absl::StatusOr<long long> k = ParseInt(field);
      if (!k.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("[sweep] batch_caps: ", k.status().message()));
      }
      config.sweep_batch_caps.push_back(*k);
    }
  }
  RETURN_IF_ERROR(r.Int("sweep", "replicates", config.sweep_replicates));

  if (std::optional<std::string> states = r.Get("diagnose", "states")) {
    for (std::string_view state : Split(*states, ';')) {
      absl::StatusOr<std::vector<double>> theta = Reader::ParseList(state);
      if (!theta.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("[diagnose] states: ", theta.status().message()));
      }
      config.diagnose_states.push_back(*std::move(theta));
    }
  }
  RETURN_IF_ERROR(r.Int("diagnose", "trials", config.diagnose_trials));

  config.output_dir =
      ResolvePath(r.Get("output", "dir").value_or(""), base_dir);
  RETURN_IF_ERROR(Validate(config));
  return config;
}

absl::StatusOr<ExperimentConfig> LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string base_dir = std::filesystem::absolute(path).parent_path().string();
  absl::StatusOr<ExperimentConfig> config =
      ParseExperimentConfig(buffer.str(), base_dir);
  if (!config.ok()) {
    return absl::Status(config.status().code(),
                        absl::StrCat(path, ": ", config.status().message()));
  }
  return config;
}

std::string SerializeExperimentConfig(const ExperimentConfig& config) {
  const ModelSpec& model = config.model;
  const SamplerConfig& sampler = config.sampler;
  std::string out;
  absl::StrAppend(&out, "[model]\n");
  absl::StrAppend(&out, "type = ",
                  model.kind == ModelKind::kMixture ? "mixture" : "logistic",
                  "\n");
  absl::StrAppend(&out, "temperature = ", FormatDouble(model.temperature),
                  "\n");
  absl::StrAppend(&out, "domain_lower = ", JoinDoubles(model.domain.lower),
                  "\n");
  absl::StrAppend(&out, "domain_upper = ", JoinDoubles(model.domain.upper),
                  "\n");
  if (model.kind == ModelKind::kMixture) {
    if (!model.data_path.empty()) {
      absl::StrAppend(&out, "data = ", model.data_path, "\n");
    } else {
      absl::StrAppend(&out, "n = ", model.n, "\n");
      absl::StrAppend(&out, "data_seed = ", model.data_seed, "\n");
      absl::StrAppend(&out, "theta1 = ", FormatDouble(model.mixture.theta1),
                      "\n");
      absl::StrAppend(&out, "theta2 = ", FormatDouble(model.mixture.theta2),
                      "\n");
    }
    absl::StrAppend(&out, "sigma_x2 = ", FormatDouble(model.mixture.sigma_x2),
                    "\n");
  } else {
    if (!model.features_path.empty()) {
      absl::StrAppend(&out, "features = ", model.features_path, "\n");
      if (!model.holdout_path.empty()) {
        absl::StrAppend(&out, "holdout = ", model.holdout_path, "\n");
      }
    } else {
      absl::StrAppend(&out, "theta_true = ", JoinDoubles(model.theta_true),
                      "\n");
      absl::StrAppend(&out, "n = ", model.n, "\n");
      absl::StrAppend(&out, "data_seed = ", model.data_seed, "\n");
      absl::StrAppend(&out, "holdout_n = ", model.holdout_n, "\n");
      absl::StrAppend(&out, "bias = ", FormatDouble(model.feature_bias), "\n");
    }
  }

  absl::StrAppend(&out, "\n[sampler]\n");
  absl::StrAppend(&out, "mode = ", ModeName(sampler.mode), "\n");
  absl::StrAppend(&out, "lambda = ", FormatDouble(sampler.lambda), "\n");
  if (config.auto_batch_cap) {
    absl::StrAppend(&out, "batch_cap = auto\n");
  } else {
    absl::StrAppend(&out, "batch_cap = ", sampler.batch_cap, "\n");
  }
  absl::StrAppend(&out, "batch_cap_divisor = ",
                  FormatDouble(config.batch_cap_divisor), "\n");
  absl::StrAppend(&out, "epsilon = ", FormatDouble(sampler.epsilon), "\n");
  absl::StrAppend(&out, "delta = ", FormatDouble(sampler.delta), "\n");
  if (config.auto_proposal_scale) {
    absl::StrAppend(&out, "proposal_scale = auto\n");
  } else {
    absl::StrAppend(
        &out, "proposal_scale = ", FormatDouble(sampler.proposal_scale), "\n");
  }
  absl::StrAppend(&out, "iters = ", sampler.iters, "\n");
  absl::StrAppend(&out, "seed = ", sampler.seed, "\n");
  if (config.initial.has_value()) {
    absl::StrAppend(&out, "initial = ", JoinDoubles(*config.initial), "\n");
  }

  absl::StrAppend(&out, "\n[tuning]\n");
  absl::StrAppend(
      &out, "target = ", FormatDouble(config.tuning.target_acceptance), "\n");
  absl::StrAppend(&out, "tolerance = ", FormatDouble(config.tuning.tolerance),
                  "\n");
  absl::StrAppend(&out, "steps = ", config.tuning.total_steps, "\n");
  absl::StrAppend(&out, "block = ", config.tuning.block_steps, "\n");

  absl::StrAppend(&out, "\n[metrics]\n");
  absl::StrAppend(&out, "burn_in = ", FormatDouble(config.burn_in), "\n");
  absl::StrAppend(&out, "grid_resolution = ", config.grid_resolution, "\n");
  if (!config.grid_lower.empty()) {
    absl::StrAppend(&out, "grid_lower = ", JoinDoubles(config.grid_lower),
                    "\n");
    absl::StrAppend(&out, "grid_upper = ", JoinDoubles(config.grid_upper),
                    "\n");
  }
  if (config.delta_slack.has_value()) {
    absl::StrAppend(&out, "delta_slack = ", FormatDouble(*config.delta_slack),
                    "\n");
  }

  absl::StrAppend(&out, "\n[sweep]\n");
  if (!config.sweep_modes.empty()) {
    absl::StrAppend(&out, "modes = ",
                    absl::StrJoin(config.sweep_modes, ",",
                                  [](std::string* s, SamplerMode m) {
                                    s->append(ModeName(m));
                                  }),
                    "\n");
  }
  if (!config.sweep_epsilons.empty()) {
    absl::StrAppend(&out, "epsilons = ", JoinDoubles(config.sweep_epsilons),
                    "\n");
  }
  if (!config.sweep_batch_caps.empty()) {
    absl::StrAppend(&out, "batch_caps = ",
                    absl::StrJoin(config.sweep_batch_caps, ","), "\n");
  }
  absl::StrAppend(&out, "replicates = ", config.sweep_replicates, "\n");

  absl::StrAppend(&out, "\n[diagnose]\n");
  if (!config.diagnose_states.empty()) {
    absl::StrAppend(&out, "states = ",
                    absl::StrJoin(config.diagnose_states, ";",
                                  [](std::string* s, const Vector& v) {
                                    s->append(JoinDoubles(v));
                                  }),
                    "\n");
  }
  absl::StrAppend(&out, "trials = ", config.diagnose_trials, "\n");

  if (!config.output_dir.empty()) {
    absl::StrAppend(&out, "\n[output]\ndir = ", config.output_dir, "\n");
  }
  return out;
}

}  // namespace dpmh::harness
