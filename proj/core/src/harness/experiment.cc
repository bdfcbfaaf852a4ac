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

#include "dpmh/harness/experiment.h"

#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpmh/csv.h"
#include "dpmh/diagnostics/kernel.h"
#include "dpmh/diagnostics/sample_metrics.h"
#include "dpmh/mixture_model.h"
#include "dpmh/status_macros.h"
#include "dpmh/trace_io.h"

namespace dpmh::harness {
namespace {

namespace fs = std::filesystem;
using diagnostics::MeanEstimate;
using diagnostics::MeanWithStderr;

constexpr uint64_t kTuningStream = 0x74756e65;  // "tune"
constexpr double kTuningStartFraction = 0.125;
constexpr uint64_t kHoldoutStream = 0x686f6c64;  // "hold"
constexpr uint64_t kReferenceStream = 0x72656665;

const double kNan = std::numeric_limits<double>::quiet_NaN();

absl::Status EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::NotFoundError(absl::StrCat("cannot create output directory ",
                                            dir, ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << text;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

// Fills in automatic K; the proposal scale is resolved by tuning later.
absl::Status ResolveBatchCap(const EnergyModel& model,
                             ExperimentConfig& config) {
  if (!config.auto_batch_cap) return absl::OkStatus();
  config.sampler.batch_cap =
      DefaultBatchCap(config.sampler.epsilon, model.total_bound(),
                      model.max_bound(), config.batch_cap_divisor);
  config.auto_batch_cap = false;
  return absl::OkStatus();
}

Vector InitialState(const ExperimentConfig& config, const EnergyModel& model) {
  if (config.initial.has_value()) return *config.initial;
  return model.domain().Center();
}

std::vector<diagnostics::GridAxis> GridAxes(const ExperimentConfig& config,
                                            const EnergyModel& model) {
  const Vector& lower =
      config.grid_lower.empty() ? model.domain().lower : config.grid_lower;
  const Vector& upper =
      config.grid_upper.empty() ? model.domain().upper : config.grid_upper;
  std::vector<diagnostics::GridAxis> axes;
  for (std::size_t j = 0; j < lower.size(); ++j) {
    axes.push_back({lower[j], upper[j], config.grid_resolution});
  }
  return axes;
}

void AddMean(std::vector<MetricRow>& rows, const std::string& metric,
             const std::string& id, std::span<const double> values) {
  const MeanEstimate m = MeanWithStderr(values);
  rows.push_back({metric, id, m.mean, m.std_error});
}

absl::Status TraceMetrics(const ExperimentConfig& config,
                          const BuiltModel& built, const Vector& theta0,
                          const RunOutcome& run, const std::string& id,
                          const std::string& out_dir,
                          std::vector<MetricRow>& rows) {
  const EnergyModel& model = *built.model;
  const SamplerConfig& sampler = config.sampler;
  const std::vector<StepRecord>& trace = run.chain.trace;
  const double n_steps = static_cast<double>(trace.size());
  rows.push_back({"iters", id, n_steps, kNan});
  rows.push_back({"proposal_scale", id, sampler.proposal_scale, kNan});
  rows.push_back(
      {"batch_cap", id, static_cast<double>(sampler.batch_cap), kNan});
  rows.push_back({"data_size", id, static_cast<double>(model.size()), kNan});

  std::vector<double> accepted, touches, batch_sizes, batch_excess;
  int64_t minibatch = 0, fullbatch = 0, outside = 0, noisy = 0;
  const double lambda = sampler.lambda;
  Vector previous = theta0;
  for (const StepRecord& record : trace) {
    accepted.push_back(record.accepted ? 1.0 : 0.0);
    touches.push_back(static_cast<double>(record.data_touches));
    switch (record.branch) {
      case Branch::kMinibatch:
        ++minibatch;
        break;
      case Branch::kFullBatch:
        ++fullbatch;
        break;
      case Branch::kOutOfDomain:
        ++outside;
        break;
    }
    if (record.noise_added) ++noisy;
    if (record.branch == Branch::kMinibatch) {
      const double b = static_cast<double>(record.batch_size);
      batch_sizes.push_back(b);
      const double m = model.Distance(previous, record.theta_proposed);
      batch_excess.push_back(b - (lambda + model.total_bound() * m));
    }
    previous = record.theta;
  }
  AddMean(rows, "acceptance_rate", id, accepted);
  AddMean(rows, "mean_data_touches", id, touches);
  AddMean(rows, "mean_batch_size", id, batch_sizes);
  AddMean(rows, "batch_size_excess", id, batch_excess);
  const double denom = std::max(n_steps, 1.0);
  rows.push_back({"minibatch_fraction", id, minibatch / denom, kNan});
  rows.push_back({"fullbatch_fraction", id, fullbatch / denom, kNan});
  rows.push_back({"out_of_domain_fraction", id, outside / denom, kNan});
  rows.push_back({"noise_fraction", id, noisy / denom, kNan});

  const EpsilonDelta totals = run.ledger.totals();
  rows.push_back({"composed_steps", id,
                  static_cast<double>(run.ledger.composed_steps()), kNan});
  rows.push_back({"eps_total", id, totals.epsilon, kNan});
  rows.push_back({"delta_total", id, totals.delta, kNan});

  if (trace.empty()) return absl::OkStatus();
  const std::span<const StepRecord> kept =
      diagnostics::PostBurnIn(trace, config.burn_in);
  const std::vector<Vector> samples = diagnostics::ThetaSamples(kept);
  if (samples.empty()) return absl::OkStatus();

  std::optional<diagnostics::GridPosterior> grid;
  if (model.dim() <= 2) {
    ASSIGN_OR_RETURN(grid, diagnostics::ComputeGridPosterior(
                               model, GridAxes(config, model)));
    if (!out_dir.empty()) {
      RETURN_IF_ERROR(diagnostics::WriteGridPosteriorCsv(
          (fs::path(out_dir) / "grid_posterior.csv").string(), *grid));
    }
    const diagnostics::GridHistogram histogram =
        diagnostics::HistogramOnGrid(samples, *grid);
    rows.push_back({"outside_grid_fraction", id,
                    histogram.outside / static_cast<double>(samples.size()),
                    kNan});
    absl::StatusOr<double> kl = diagnostics::SymmetricKlToGrid(samples, *grid);
    rows.push_back({"symmetric_kl", id, kl.ok() ? *kl : kNan, kNan});
  }
  if (built.holdout.has_value()) {
    ASSIGN_OR_RETURN(double accuracy,
                     diagnostics::TestAccuracy(samples, *built.holdout));
    rows.push_back({"test_accuracy", id, accuracy, kNan});
    if (grid.has_value()) {
      ASSIGN_OR_RETURN(double reference, diagnostics::GridPredictiveAccuracy(
                                             *grid, *built.holdout));
      rows.push_back({"grid_test_accuracy", id, reference, kNan});
    }
  }
  return absl::OkStatus();
}

}  // namespace

int64_t DefaultBatchCap(double epsilon, double total_bound, double max_bound,
                        double divisor) {
  const double k = std::round(epsilon * total_bound / (divisor * max_bound));
  if (!(k >= 1.0)) return 1;
  return static_cast<int64_t>(k);
}

uint64_t DeriveCellSeed(uint64_t master_seed, SamplerMode mode, double epsilon,
                        int64_t batch_cap, int64_t replicate) {
  uint64_t h = MixSeed(master_seed);
  h = HashCombine(h, static_cast<uint64_t>(mode));
  h = HashCombine(h, std::bit_cast<uint64_t>(epsilon));
  h = HashCombine(h, static_cast<uint64_t>(batch_cap));
  h = HashCombine(h, static_cast<uint64_t>(replicate));
  return h;
}

std::string CellId(SamplerMode mode, double epsilon, int64_t batch_cap,
                   int64_t replicate) {
  return absl::StrCat(ModeName(mode), "_eps", epsilon, "_K", batch_cap, "_r",
                      replicate);
}

absl::StatusOr<BuiltModel> BuildModel(const ModelSpec& spec) {
  BuiltModel built;
  if (spec.kind == ModelKind::kMixture) {
    std::vector<double> data;
    if (!spec.data_path.empty()) {
      ASSIGN_OR_RETURN(data, ReadMixtureData(spec.data_path));
    } else {
      ASSIGN_OR_RETURN(
          data, GenerateMixtureData(spec.n, spec.data_seed, spec.mixture));
    }
    ASSIGN_OR_RETURN(built.model, MixtureModel::Create(
                                      std::move(data), spec.mixture.sigma_x2,
                                      spec.temperature, spec.domain));
    return built;
  }
  LabeledData data;
  if (!spec.features_path.empty()) {
    ASSIGN_OR_RETURN(data, LoadFeatureCsv(spec.features_path));
    if (!spec.holdout_path.empty()) {
      ASSIGN_OR_RETURN(built.holdout, LoadFeatureCsv(spec.holdout_path));
      if (built.holdout->dim != data.dim) {
        return absl::InvalidArgumentError(
            "holdout and training features differ in dimension");
      }
    }
  } else {
    ASSIGN_OR_RETURN(
        data, GenerateLogisticData(spec.n, spec.theta_true, spec.data_seed,
                                   spec.feature_bias));
    if (spec.holdout_n > 0) {
      ASSIGN_OR_RETURN(
          built.holdout,
          GenerateLogisticData(spec.holdout_n, spec.theta_true,
                               HashCombine(spec.data_seed, kHoldoutStream),
                               spec.feature_bias));
    }
  }
  ASSIGN_OR_RETURN(built.logistic,
                   LogisticRegressionModel::Create(
                       std::move(data), spec.temperature, spec.domain));
  built.model = built.logistic;
  return built;
}

absl::Status WriteMetricsCsv(const std::string& path,
                             const std::vector<MetricRow>& rows) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << "metric,config_id,value,stderr\n";
  for (const MetricRow& row : rows) {
    out << row.metric << ',' << row.config_id << ',' << FormatDouble(row.value)
        << ',' << FormatDouble(row.std_error) << '\n';
  }
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<RunOutcome> RunExperiment(const ExperimentConfig& config,
                                         const std::string& out_dir,
                                         const std::string& config_id) {
  ASSIGN_OR_RETURN(BuiltModel built, BuildModel(config.model));
  RunOutcome outcome;
  outcome.resolved = config;
  ExperimentConfig& resolved = outcome.resolved;
  RETURN_IF_ERROR(ResolveBatchCap(*built.model, resolved));
  if (resolved.auto_proposal_scale) {
    // Tuning descends from a large step so it settles on the largest scale
    // that reaches the target rate.
    resolved.sampler.proposal_scale =
        built.model->domain().Diameter() * kTuningStartFraction;
  }
  ASSIGN_OR_RETURN(Sampler sampler,
                   Sampler::Create(built.model, resolved.sampler));
  const Vector theta0 = InitialState(resolved, *built.model);

  std::optional<TuningResult> tuning;
  if (resolved.auto_proposal_scale) {
    // Tuning runs on its own chain and streams so the measured chain, and
    // therefore the trace, depends only on the resolved configuration.
    ASSIGN_OR_RETURN(ChainState tune_state,
                     sampler.Init(theta0, HashCombine(resolved.sampler.seed,
                                                      kTuningStream)));
    ASSIGN_OR_RETURN(tuning,
                     TuneProposalScale(sampler, tune_state, resolved.tuning));
    resolved.sampler.proposal_scale = tuning->proposal_scale;
    resolved.auto_proposal_scale = false;
    ASSIGN_OR_RETURN(sampler,
                     sampler.WithProposalScale(tuning->proposal_scale));
  }

  const double slack = resolved.delta_slack.value_or(resolved.sampler.delta);
  if (!(slack > 0.0 && slack < 1.0)) {
    return absl::InvalidArgumentError("delta_slack must lie in (0, 1)");
  }
  outcome.ledger = PrivacyLedger(slack);
  ASSIGN_OR_RETURN(ChainState state, sampler.Init(theta0));

  std::optional<TraceCsvWriter> writer;
  if (!out_dir.empty()) {
    RETURN_IF_ERROR(EnsureDirectory(out_dir));
    RETURN_IF_ERROR(WriteText((fs::path(out_dir) / "resolved.cfg").string(),
                              SerializeExperimentConfig(resolved)));
    ASSIGN_OR_RETURN(
        writer, TraceCsvWriter::Open((fs::path(out_dir) / "trace.csv").string(),
                                     built.model->dim()));
  }
  PrivacyLedger& ledger = outcome.ledger;
  outcome.chain = RunChain(sampler, state, resolved.sampler.iters,
                           [&](const StepRecord& record) -> absl::Status {
                             RecordStep(ledger, record);
                             if (writer.has_value())
                               return writer->Write(record);
                             return absl::OkStatus();
                           });

  std::vector<MetricRow>& rows = outcome.metrics;
  if (tuning.has_value()) {
    rows.push_back(
        {"tuning_acceptance", config_id, tuning->acceptance_rate, kNan});
  }
  absl::Status metrics_status =
      TraceMetrics(resolved, built, theta0, outcome, config_id, out_dir, rows);
  rows.push_back(
      {"clamp_count", config_id, static_cast<double>(state.clamp_count), kNan});

  if (writer.has_value()) {
    RETURN_IF_ERROR(writer->Close());
    RETURN_IF_ERROR(
        WriteLedgerCsv((fs::path(out_dir) / "ledger.csv").string(), ledger));
    RETURN_IF_ERROR(
        WriteMetricsCsv((fs::path(out_dir) / "metrics.csv").string(), rows));
  }
  RETURN_IF_ERROR(outcome.chain.status);
  RETURN_IF_ERROR(metrics_status);
  return outcome;
}

absl::StatusOr<SweepOutcome> RunSweep(const ExperimentConfig& config,
                                      const std::string& out_dir) {
  const std::vector<SamplerMode> modes =
      config.sweep_modes.empty() ? std::vector<SamplerMode>{config.sampler.mode}
                                 : config.sweep_modes;
  const std::vector<double> epsilons =
      config.sweep_epsilons.empty()
          ? std::vector<double>{config.sampler.epsilon}
          : config.sweep_epsilons;
  if (config.sweep_modes.empty() && config.sweep_epsilons.empty() &&
      config.sweep_batch_caps.empty()) {
    return absl::InvalidArgumentError(
        "sweep needs at least one of [sweep] modes, epsilons, batch_caps");
  }
  ASSIGN_OR_RETURN(BuiltModel built, BuildModel(config.model));

  SweepOutcome outcome;
  std::vector<ExperimentConfig> cell_configs;
  for (SamplerMode mode : modes) {
    for (double epsilon : epsilons) {
      std::vector<int64_t> caps = config.sweep_batch_caps;
      if (caps.empty()) {
        caps.push_back(config.auto_batch_cap
                           ? DefaultBatchCap(epsilon,
                                             built.model->total_bound(),
                                             built.model->max_bound(),
                                             config.batch_cap_divisor)
                           : config.sampler.batch_cap);
      }
      for (int64_t cap : caps) {
        for (int64_t rep = 0; rep < config.sweep_replicates; ++rep) {
          ExperimentConfig cell_config = config;
          cell_config.sampler.mode = mode;
          cell_config.sampler.epsilon = epsilon;
          cell_config.sampler.batch_cap = cap;
          cell_config.auto_batch_cap = false;
          cell_config.sweep_modes.clear();
          cell_config.sweep_epsilons.clear();
          cell_config.sweep_batch_caps.clear();
          cell_config.sweep_replicates = 1;
          cell_config.sampler.seed =
              DeriveCellSeed(config.sampler.seed, mode, epsilon, cap, rep);
          SweepCell cell{CellId(mode, epsilon, cap, rep),
                         mode,
                         epsilon,
                         cap,
                         rep,
                         cell_config.sampler.seed,
                         absl::OkStatus()};
          outcome.cells.push_back(std::move(cell));
          cell_configs.push_back(std::move(cell_config));
        }
      }
    }
  }

  RETURN_IF_ERROR(EnsureDirectory(out_dir));
  std::vector<std::vector<MetricRow>> cell_metrics(outcome.cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= outcome.cells.size()) return;
      SweepCell& cell = outcome.cells[i];
      absl::StatusOr<RunOutcome> run = RunExperiment(
          cell_configs[i], (fs::path(out_dir) / cell.config_id).string(),
          cell.config_id);
      if (run.ok()) {
        cell_metrics[i] = std::move(run->metrics);
      } else {
        cell.status = run.status();
      }
    }
  };
  const int workers = std::max(1, config.workers);
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::string index =
      "config_id,mode,epsilon,batch_cap,replicate,seed,status\n";
  for (std::size_t i = 0; i < outcome.cells.size(); ++i) {
    const SweepCell& cell = outcome.cells[i];
    if (!cell.status.ok()) ++outcome.failures;
    absl::StrAppend(
        &index, cell.config_id, ",", ModeName(cell.mode), ",",
        FormatDouble(cell.epsilon), ",", cell.batch_cap, ",", cell.replicate,
        ",", cell.seed, ",",
        cell.status.ok() ? "ok" : absl::StatusCodeToString(cell.status.code()),
        "\n");
    for (MetricRow& row : cell_metrics[i]) {
      outcome.metrics.push_back(std::move(row));
    }
  }
  RETURN_IF_ERROR(
      WriteText((fs::path(out_dir) / "sweep_index.csv").string(), index));
  RETURN_IF_ERROR(WriteMetricsCsv(
      (fs::path(out_dir) / "sweep_metrics.csv").string(), outcome.metrics));
  return outcome;
}

absl::StatusOr<std::vector<MetricRow>> RunDiagnose(
    const ExperimentConfig& config, const std::string& out_dir) {
  if (config.diagnose_states.size() < 2) {
    return absl::InvalidArgumentError(
        "[diagnose] states must list at least two states");
  }
  ASSIGN_OR_RETURN(BuiltModel built, BuildModel(config.model));
  ExperimentConfig resolved = config;
  RETURN_IF_ERROR(ResolveBatchCap(*built.model, resolved));
  if (resolved.auto_proposal_scale) resolved.sampler.proposal_scale = 1.0;
  ASSIGN_OR_RETURN(Sampler sampler,
                   Sampler::Create(built.model, resolved.sampler));
  SamplerConfig reference_config = resolved.sampler;
  reference_config.mode = SamplerMode::kMh;
  ASSIGN_OR_RETURN(Sampler reference,
                   Sampler::Create(built.model, reference_config));

  const std::string id(ModeName(resolved.sampler.mode));
  const uint64_t seed = resolved.sampler.seed;
  ASSIGN_OR_RETURN(diagnostics::KernelEstimate kernel,
                   diagnostics::EstimateKernel(sampler, config.diagnose_states,
                                               config.diagnose_trials, seed));
  ASSIGN_OR_RETURN(
      diagnostics::KernelEstimate mh_kernel,
      diagnostics::EstimateKernel(reference, config.diagnose_states,
                                  config.diagnose_trials,
                                  HashCombine(seed, kReferenceStream)));
  const std::vector<double> pi =
      diagnostics::StatePosterior(*built.model, config.diagnose_states);

  std::vector<MetricRow> rows;
  const diagnostics::DetailedBalanceReport balance =
      diagnostics::CheckDetailedBalance(kernel, pi);
  rows.push_back(
      {"detailed_balance_max_residual", id, balance.max_residual, kNan});
  rows.push_back({"detailed_balance_max_z", id, balance.max_z, kNan});
  rows.push_back(
      {"detailed_balance_pass", id, balance.passes ? 1.0 : 0.0, kNan});
  absl::StatusOr<std::vector<double>> stationary =
      diagnostics::StationaryDistribution(kernel);
  rows.push_back(
      {"stationary_tv", id,
       stationary.ok() ? diagnostics::TotalVariation(*stationary, pi) : kNan,
       kNan});
  const EnergyModel& model = *built.model;
  if (resolved.sampler.mode == SamplerMode::kDpFast) {
    rows.push_back({"gap_ratio_lower_bound", id,
                    diagnostics::SpectralGapRatioLowerBound(
                        resolved.sampler, model.total_bound(),
                        model.max_bound(), model.domain_diameter()),
                    kNan});
  }

  absl::StatusOr<diagnostics::GapEstimate> gap =
      diagnostics::SpectralGap(kernel, pi);
  absl::StatusOr<diagnostics::GapEstimate> mh_gap =
      diagnostics::SpectralGap(mh_kernel, pi);
  absl::Status status = absl::OkStatus();
  if (gap.ok() && mh_gap.ok()) {
    rows.push_back({"spectral_gap", id, gap->gap, gap->std_error});
    rows.push_back({"mh_spectral_gap", id, mh_gap->gap, mh_gap->std_error});
    const double ratio = gap->gap / mh_gap->gap;
    const double rel =
        std::hypot(gap->std_error / gap->gap, mh_gap->std_error / mh_gap->gap);
    rows.push_back({"gap_ratio", id, ratio, std::abs(ratio) * rel});
  } else {
    status = gap.ok() ? mh_gap.status() : gap.status();
  }

  if (!out_dir.empty()) {
    RETURN_IF_ERROR(EnsureDirectory(out_dir));
    RETURN_IF_ERROR(
        WriteMetricsCsv((fs::path(out_dir) / "metrics.csv").string(), rows));
    std::string csv = "from,to,mode,transition,stderr\n";
    for (const auto& [estimate, mode] :
         {std::pair{&kernel, ModeName(resolved.sampler.mode)},
          std::pair{&mh_kernel, ModeName(SamplerMode::kMh)}}) {
      for (std::size_t x = 0; x < estimate->size(); ++x) {
        for (std::size_t y = 0; y < estimate->size(); ++y) {
          absl::StrAppend(&csv, x, ",", y, ",", mode, ",",
                          FormatDouble(estimate->at(x, y)), ",",
                          FormatDouble(estimate->stderr_at(x, y)), "\n");
        }
      }
    }
    RETURN_IF_ERROR(
        WriteText((fs::path(out_dir) / "kernel.csv").string(), csv));
  }
  RETURN_IF_ERROR(status);
  return rows;
}

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
      return 2;
    default:
      return 3;
  }
}

}  // namespace dpmh::harness
