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

#include "dpmh/sampler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpmh/status_macros.h"

namespace dpmh {
namespace {

constexpr double kArtanhClamp = 1.0 - 1e-12;
constexpr double kKeepTolerance = 1e-9;

}  // namespace

const char* BranchName(Branch branch) {
  switch (branch) {
    case Branch::kMinibatch:
      return "minibatch";
    case Branch::kFullBatch:
      return "fullbatch";
    case Branch::kOutOfDomain:
      return "out_of_domain";
  }
  return "unknown";
}

ChainStreams::ChainStreams(uint64_t seed)
    : proposal(HashCombine(seed, 1)),
      batch(HashCombine(seed, 2)),
      noise(HashCombine(seed, 3)),
      accept(HashCombine(seed, 4)) {}

Vector Propose(std::span<const double> theta, double scale, Rng& rng) {
  Vector out(theta.begin(), theta.end());
  for (double& v : out) v += scale * rng.Normal();
  return out;
}

absl::StatusOr<int64_t> DrawBatchSize(double lambda, double total_bound,
                                      double distance, Rng& rng) {
  if (!(lambda > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be positive, got ", lambda));
  }
  const double mean = lambda + total_bound * distance;
  if (!std::isfinite(mean)) {
    return absl::InternalError("non-finite Poisson mean");
  }
  return rng.Poisson(mean);
}

double KeepProbability(double bound, double total_bound, double lambda,
                       double distance, double energy_diff) {
  const double numerator =
      lambda * bound + 0.5 * total_bound * (-energy_diff + bound * distance);
  const double denominator = lambda * bound + bound * total_bound * distance;
  return numerator / denominator;
}

absl::StatusOr<std::vector<BatchTerm>> FormBatch(
    const EnergyModel& model, const AliasSampler& index_sampler,
    std::span<const double> theta, std::span<const double> theta_prime,
    int64_t batch_size, double lambda, Rng& rng) {
  std::vector<BatchTerm> kept;
  if (batch_size <= 0) return kept;
  const double c_total = model.total_bound();
  const double distance = model.Distance(theta, theta_prime);
  for (int64_t b = 0; b < batch_size; ++b) {
    const std::size_t i = index_sampler.Sample(rng);
    const double diff = model.Energy(i, theta) - model.Energy(i, theta_prime);
    double p = KeepProbability(model.bound(i), c_total, lambda, distance, diff);
    if (!(p >= -kKeepTolerance && p <= 1.0 + kKeepTolerance)) {
      return absl::InternalError(absl::StrCat(
          "keep probability ", p, " for datum ", i,
          " outside [0, 1]: |U_i(a) - U_i(b)| exceeds c_i M(a, b)"));
    }
    p = std::clamp(p, 0.0, 1.0);
    if (rng.Uniform() < p) kept.push_back({i, diff});
  }
  return kept;
}

absl::StatusOr<double> LogMhRatioMinibatch(const EnergyModel& model,
                                           std::span<const BatchTerm> batch,
                                           double distance, double lambda,
                                           double log_shift,
                                           int64_t* clamp_count) {
  const double c_total = model.total_bound();
  const double scale = 2.0 * lambda + c_total * distance;
  double sum = 0.0;
  for (const BatchTerm& term : batch) {
    double arg = c_total * term.energy_diff / (model.bound(term.index) * scale);
    if (std::abs(arg) > kArtanhClamp) {
      arg = std::copysign(kArtanhClamp, arg);
      if (clamp_count != nullptr) ++*clamp_count;
    }
    sum += std::atanh(arg);
  }
  const double log_ratio = 2.0 * sum + log_shift;
  if (!std::isfinite(log_ratio)) {
    return absl::InternalError("non-finite minibatch log acceptance ratio");
  }
  return log_ratio;
}

Sampler::Sampler(std::shared_ptr<const EnergyModel> model, SamplerConfig config,
                 NoiseCalibration calibration)
    : model_(std::move(model)),
      config_(config),
      calibration_(calibration),
      index_sampler_(std::make_shared<const AliasSampler>(model_->bounds())) {}

absl::StatusOr<Sampler> Sampler::Create(
    std::shared_ptr<const EnergyModel> model, SamplerConfig config) {
  if (model == nullptr) return absl::InvalidArgumentError("null model");
  RETURN_IF_ERROR(config.Validate());
  NoiseCalibration calibration;
  if (ModeIsPrivate(config.mode)) {
    // Only dpfast can reach the minibatch branch.
    const int64_t cap =
        config.mode == SamplerMode::kDpFast ? config.batch_cap : 0;
    ASSIGN_OR_RETURN(calibration,
                     Calibrate(config.epsilon, config.delta, cap,
                               model->total_bound(), model->max_bound()));
  }
  return Sampler(std::move(model), config, calibration);
}

EpsilonDelta Sampler::per_step_spend() const {
  if (ModeIsPrivate(config_.mode)) return {config_.epsilon, config_.delta};
  const double inf = std::numeric_limits<double>::infinity();
  return {inf, inf};
}

absl::StatusOr<Sampler> Sampler::WithProposalScale(double scale) const {
  SamplerConfig config = config_;
  config.proposal_scale = scale;
  RETURN_IF_ERROR(config.Validate());
  Sampler copy = *this;
  copy.config_ = config;
  return copy;
}

absl::StatusOr<ChainState> Sampler::Init(Vector theta0, uint64_t seed) const {
  if (theta0.size() != model_->dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("initial state has dimension ", theta0.size(),
                     ", model expects ", model_->dim()));
  }
  if (!model_->domain().Contains(theta0)) {
    return absl::InvalidArgumentError("initial state lies outside the domain");
  }
  ChainState state{std::move(theta0), 0, std::nullopt, ChainStreams(seed), 0};
  const double energy = model_->TotalEnergy(state.theta);
  if (!std::isfinite(energy)) {
    return absl::InternalError("non-finite energy at the initial state");
  }
  state.total_energy = energy;
  return state;
}

absl::StatusOr<StepRecord> Sampler::Step(ChainState& state) const {
  Proposal proposal{
      Propose(state.theta, config_.proposal_scale, state.rng.proposal),
      std::nullopt};
  return StepWithProposal(state, proposal);
}

absl::StatusOr<StepRecord> Sampler::StepWithProposal(
    ChainState& state, const Proposal& proposal) const {
  if (proposal.theta.size() != model_->dim()) {
    return absl::InvalidArgumentError("proposal dimension mismatch");
  }
  StepRecord record;
  record.iter = state.iter;
  record.theta_proposed = proposal.theta;

  if (!model_->domain().Contains(proposal.theta)) {
    record.branch = Branch::kOutOfDomain;
    record.log_ratio = -std::numeric_limits<double>::infinity();
    record.theta = state.theta;
    ++state.iter;
    return record;
  }

  const EpsilonDelta spend = per_step_spend();
  record.eps_spent = spend.epsilon;
  record.delta_spent = spend.delta;
  const double distance = model_->Distance(state.theta, proposal.theta);
  const bool private_mode = ModeIsPrivate(config_.mode);

  bool minibatch = false;
  if (ModeDrawsBatchSize(config_.mode)) {
    ASSIGN_OR_RETURN(record.batch_size,
                     DrawBatchSize(config_.lambda, model_->total_bound(),
                                   distance, state.rng.batch));
    minibatch = config_.mode == SamplerMode::kTunaMh ||
                record.batch_size < config_.batch_cap;
  }

  if (minibatch) {
    RETURN_IF_ERROR(
        MinibatchBranch(state, proposal, distance, private_mode, record));
  } else {
    double proposal_energy;
    if (proposal.total_energy.has_value()) {
      proposal_energy = *proposal.total_energy;
    } else {
      proposal_energy = model_->TotalEnergy(proposal.theta);
    }
    RETURN_IF_ERROR(FullBatchBranch(state, proposal_energy, distance,
                                    config_.mode == SamplerMode::kPenalty,
                                    private_mode, record));
  }
  record.theta = state.theta;
  ++state.iter;
  return record;
}

absl::Status Sampler::MinibatchBranch(ChainState& state,
                                      const Proposal& proposal, double distance,
                                      bool private_mode,
                                      StepRecord& record) const {
  record.branch = Branch::kMinibatch;
  record.data_touches = record.batch_size;
  ASSIGN_OR_RETURN(
      std::vector<BatchTerm> batch,
      FormBatch(*model_, *index_sampler_, state.theta, proposal.theta,
                record.batch_size, config_.lambda, state.rng.batch));
  record.batch_kept = static_cast<int64_t>(batch.size());
  ASSIGN_OR_RETURN(record.sensitivity, SensitivityL1(model_->total_bound(),
                                                     distance, config_.lambda));
  if (private_mode &&
      record.sensitivity > calibration_.free_threshold_minibatch) {
    record.noise_added = true;
    record.noise_stddev = calibration_.sigma1 * record.sensitivity;
    record.noise_value = record.noise_stddev * state.rng.noise.Normal();
    record.log_shift =
        record.noise_value - 0.5 * record.noise_stddev * record.noise_stddev;
  }
  ASSIGN_OR_RETURN(double log_ratio,
                   LogMhRatioMinibatch(*model_, batch, distance, config_.lambda,
                                       record.log_shift, &state.clamp_count));
  record.log_ratio = log_ratio + model_->LogPrior(proposal.theta) -
                     model_->LogPrior(state.theta);
  record.accepted = std::log(state.rng.accept.Uniform()) < record.log_ratio;
  if (record.accepted) {
    state.theta = proposal.theta;
    state.total_energy = proposal.total_energy;
  }
  return absl::OkStatus();
}

absl::Status Sampler::FullBatchBranch(ChainState& state, double proposal_energy,
                                      double distance, bool always_noise,
                                      bool private_mode,
                                      StepRecord& record) const {
  record.branch = Branch::kFullBatch;
  record.data_touches = static_cast<int64_t>(model_->size());
  if (!state.total_energy.has_value()) {
    state.total_energy = model_->TotalEnergy(state.theta);
  }
  if (!std::isfinite(proposal_energy) || !std::isfinite(*state.total_energy)) {
    return absl::InternalError("non-finite total energy");
  }
  record.sensitivity = SensitivityL2(model_->max_bound(), distance);
  if (always_noise ||
      (private_mode &&
       record.sensitivity > calibration_.free_threshold_fullbatch)) {
    record.noise_added = true;
    record.noise_stddev = calibration_.sigma2 * record.sensitivity;
    record.noise_value = record.noise_stddev * state.rng.noise.Normal();
    record.log_shift =
        record.noise_value - 0.5 * record.noise_stddev * record.noise_stddev;
  }
  record.log_ratio =
      (*state.total_energy - proposal_energy) + record.log_shift +
      model_->LogPrior(record.theta_proposed) - model_->LogPrior(state.theta);
  if (!std::isfinite(record.log_ratio)) {
    return absl::InternalError("non-finite full-batch log acceptance ratio");
  }
  record.accepted = std::log(state.rng.accept.Uniform()) < record.log_ratio;
  if (record.accepted) {
    state.theta = record.theta_proposed;
    state.total_energy = proposal_energy;
  }
  return absl::OkStatus();
}

ChainRun RunChain(const Sampler& sampler, ChainState& state, int64_t iters,
                  const StepSink& sink) {
  ChainRun run;
  run.trace.reserve(static_cast<std::size_t>(std::max<int64_t>(iters, 0)));
  for (int64_t t = 0; t < iters; ++t) {
    absl::StatusOr<StepRecord> record = sampler.Step(state);
    if (!record.ok()) {
      run.status = record.status();
      return run;
    }
    if (sink) {
      if (absl::Status s = sink(*record); !s.ok()) {
        run.trace.push_back(*std::move(record));
        run.status = s;
        return run;
      }
    }
    run.trace.push_back(*std::move(record));
  }
  return run;
}

absl::StatusOr<TuningResult> TuneProposalScale(const Sampler& sampler,
                                               ChainState& state,
                                               const TuningOptions& options) {
  if (!(options.target_acceptance > 0.0 && options.target_acceptance < 1.0)) {
    return absl::InvalidArgumentError("target acceptance must lie in (0, 1)");
  }
  if (!(options.tolerance >= 0.0)) {
    return absl::InvalidArgumentError("tolerance must be nonnegative");
  }
  if (options.block_steps < 1 || options.total_steps < options.block_steps) {
    return absl::InvalidArgumentError(
        "tuning needs block_steps >= 1 and total_steps >= block_steps");
  }
  // Acceptance need not be monotone in the scale for minibatch modes, so the
  // bracketing phase moves in small factors to avoid jumping over a root.
  const double log_step = 0.5 * std::log(2.0);
  double log_scale = std::log(sampler.config().proposal_scale);
  std::optional<double> log_lo, log_hi;
  TuningResult best;
  double best_gap = std::numeric_limits<double>::infinity();
  int64_t used = 0;
  while (used + options.block_steps <= options.total_steps) {
    ASSIGN_OR_RETURN(Sampler current,
                     sampler.WithProposalScale(std::exp(log_scale)));
    int64_t accepted = 0;
    for (int64_t t = 0; t < options.block_steps; ++t) {
      ASSIGN_OR_RETURN(StepRecord record, current.Step(state));
      accepted += record.accepted ? 1 : 0;
    }
    used += options.block_steps;
    const double rate = static_cast<double>(accepted) /
                        static_cast<double>(options.block_steps);
    const double gap = rate - options.target_acceptance;
    if (std::abs(gap) < best_gap) {
      best_gap = std::abs(gap);
      best = {std::exp(log_scale), rate, used};
    }
    if (std::abs(gap) <= options.tolerance) break;
    if (gap > 0.0) {
      // Accepting too often: steps are too small.
      log_lo = log_scale;
      log_scale = log_hi ? 0.5 * (*log_lo + *log_hi) : log_scale + log_step;
    } else {
      log_hi = log_scale;
      log_scale = log_lo ? 0.5 * (*log_lo + *log_hi) : log_scale - log_step;
    }
  }
  best.steps_used = used;
  return best;
}

void RecordStep(PrivacyLedger& ledger, const StepRecord& record) {
  ledger.Record(record.iter, record.eps_spent, record.delta_spent);
}

}  // namespace dpmh
