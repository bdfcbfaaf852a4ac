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

#ifndef DPMH_SAMPLER_H_
#define DPMH_SAMPLER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"
#include "dpmh/privacy.h"
#include "dpmh/random.h"
#include "dpmh/sampler_config.h"

namespace dpmh {

enum class Branch {
  kMinibatch,
  kFullBatch,
  // Proposal left the domain and was rejected before any data was read.
  kOutOfDomain,
};

const char* BranchName(Branch branch);

// One row of a chain trace.
struct StepRecord {
  int64_t iter = 0;
  // Chain state after the step.
  Vector theta;
  Vector theta_proposed;
  Branch branch = Branch::kFullBatch;
  // Poisson batch size B (0 when the mode draws none).
  int64_t batch_size = 0;
  // |I|, the kept minibatch multiset size.
  int64_t batch_kept = 0;
  // Per-datum energy evaluations at the proposal: B on the minibatch branch,
  // N on the full-batch branch.
  int64_t data_touches = 0;
  bool noise_added = false;
  double noise_value = 0.0;
  double noise_stddev = 0.0;
  // Delta(l1) on the minibatch branch, Delta(l2) on the full-batch branch.
  double sensitivity = 0.0;
  // xi - noise_stddev^2 / 2, or 0 when no noise was added.
  double log_shift = 0.0;
  double log_ratio = 0.0;
  bool accepted = false;
  double eps_spent = 0.0;
  double delta_spent = 0.0;
};

// Independent generator per source of randomness, so kernels that skip a
// draw (e.g. no noise) leave the other streams aligned across modes.
struct ChainStreams {
  explicit ChainStreams(uint64_t seed);

  Rng proposal;
  Rng batch;
  Rng noise;
  Rng accept;
};

struct ChainState {
  Vector theta;
  int64_t iter = 0;
  // Cached TotalEnergy(theta). Cleared when a minibatch step moves the chain
  // and recomputed by the next full-batch step.
  std::optional<double> total_energy;
  ChainStreams rng;
  // Number of artanh arguments clamped away from +-1.
  int64_t clamp_count = 0;
};

struct Proposal {
  Vector theta;
  // TotalEnergy(theta) if the caller already knows it.
  std::optional<double> total_energy;
};

// theta + scale * z with z ~ N(0, I).
Vector Propose(std::span<const double> theta, double scale, Rng& rng);

// B ~ Poisson(lambda + C M).
absl::StatusOr<int64_t> DrawBatchSize(double lambda, double total_bound,
                                      double distance, Rng& rng);

// One kept minibatch entry: index i and U_i(theta) - U_i(theta').
struct BatchTerm {
  std::size_t index = 0;
  double energy_diff = 0.0;
};

// Probability of keeping candidate i:
//   (lambda c_i + C/2 (U_i(theta') - U_i(theta) + c_i M)) /
//   (lambda c_i + c_i C M)
double KeepProbability(double bound, double total_bound, double lambda,
                       double distance, double energy_diff);

// Draws `batch_size` candidates with P(i) = c_i / C (with replacement) and
// keeps each with KeepProbability. Multiplicity is preserved. Returns Internal
// if a keep probability leaves [0, 1] by more than 1e-9.
absl::StatusOr<std::vector<BatchTerm>> FormBatch(
    const EnergyModel& model, const AliasSampler& index_sampler,
    std::span<const double> theta, std::span<const double> theta_prime,
    int64_t batch_size, double lambda, Rng& rng);

// log of the minibatch MH ratio:
//   2 sum_{i in I} artanh(C (U_i(theta) - U_i(theta')) / (c_i (2 lambda + C
//   M)))
//   + log_shift
// Arguments are clamped to +-(1 - 1e-12); each clamp increments
// *clamp_count when it is non-null.
absl::StatusOr<double> LogMhRatioMinibatch(const EnergyModel& model,
                                           std::span<const BatchTerm> batch,
                                           double distance, double lambda,
                                           double log_shift,
                                           int64_t* clamp_count = nullptr);

// Binds a model and configuration into a transition kernel. Copies share the
// model.
class Sampler {
 public:
  static absl::StatusOr<Sampler> Create(
      std::shared_ptr<const EnergyModel> model, SamplerConfig config);

  const SamplerConfig& config() const { return config_; }
  const EnergyModel& model() const { return *model_; }
  const std::shared_ptr<const EnergyModel>& shared_model() const {
    return model_;
  }
  const NoiseCalibration& calibration() const { return calibration_; }
  // Charged per in-domain iteration: (epsilon, delta) for private modes,
  // +inf for the non-private ones.
  EpsilonDelta per_step_spend() const;

  absl::StatusOr<Sampler> WithProposalScale(double scale) const;

  // Starts a chain at theta0, which must lie in the domain.
  absl::StatusOr<ChainState> Init(Vector theta0, uint64_t seed) const;
  absl::StatusOr<ChainState> Init(Vector theta0) const {
    return Init(std::move(theta0), config_.seed);
  }

  // One iteration: draw a proposal and apply the configured kernel.
  absl::StatusOr<StepRecord> Step(ChainState& state) const;
  // One iteration with a caller-supplied proposal.
  absl::StatusOr<StepRecord> StepWithProposal(ChainState& state,
                                              const Proposal& proposal) const;

 private:
  Sampler(std::shared_ptr<const EnergyModel> model, SamplerConfig config,
          NoiseCalibration calibration);

  absl::Status Accept(ChainState& state, StepRecord& record,
                      double proposal_energy) const;
  absl::Status MinibatchBranch(ChainState& state, const Proposal& proposal,
                               double distance, bool private_mode,
                               StepRecord& record) const;
  absl::Status FullBatchBranch(ChainState& state, double proposal_energy,
                               double distance, bool always_noise,
                               bool private_mode, StepRecord& record) const;

  std::shared_ptr<const EnergyModel> model_;
  SamplerConfig config_;
  NoiseCalibration calibration_;
  std::shared_ptr<const AliasSampler> index_sampler_;
};

// Called with each record as soon as it is produced.
using StepSink = std::function<absl::Status(const StepRecord&)>;

struct ChainRun {
  std::vector<StepRecord> trace;
  // The first error, if any; `trace` holds every step completed before it.
  absl::Status status;
};

ChainRun RunChain(const Sampler& sampler, ChainState& state, int64_t iters,
                  const StepSink& sink = nullptr);

struct TuningOptions {
  double target_acceptance = 0.6;
  double tolerance = 0.02;
  int64_t total_steps = 2000;
  int64_t block_steps = 200;
};

struct TuningResult {
  double proposal_scale = 0.0;
  double acceptance_rate = 0.0;
  int64_t steps_used = 0;
};

// Stochastic bisection on log(scale) toward the target acceptance rate,
// starting from the sampler's current scale and bracketing in factors of
// sqrt(2). Advances `state` through the tuning steps. The tuning steps touch
// the data and are not charged to any privacy ledger.
absl::StatusOr<TuningResult> TuneProposalScale(const Sampler& sampler,
                                               ChainState& state,
                                               const TuningOptions& options);

// Charges one step to the ledger.
void RecordStep(PrivacyLedger& ledger, const StepRecord& record);

}  // namespace dpmh

#endif  // DPMH_SAMPLER_H_
