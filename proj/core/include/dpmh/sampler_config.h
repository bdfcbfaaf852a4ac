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

#ifndef DPMH_SAMPLER_CONFIG_H_
#define DPMH_SAMPLER_CONFIG_H_

#include <cstdint>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpmh {

enum class SamplerMode {
  kMh,               // full-batch Metropolis-Hastings, non-private
  kTunaMh,           // Poisson-minibatch exact MH, non-private
  kDpFast,           // private minibatch MH with a batch cap K
  kDpFastFullBatch,  // kDpFast with every step on the full-batch branch
  kPenalty,          // full-batch MH with Gaussian noise on every step
};

const char* ModeName(SamplerMode mode);
absl::StatusOr<SamplerMode> ParseMode(std::string_view name);

// Modes that carry an (epsilon, delta) guarantee per iteration.
bool ModeIsPrivate(SamplerMode mode);
// Modes that draw a Poisson batch size and therefore need lambda.
bool ModeDrawsBatchSize(SamplerMode mode);

struct SamplerConfig {
  SamplerMode mode = SamplerMode::kDpFast;
  double lambda = 1.0;
  // K. Steps with B >= K run on the full batch; 0 forces every step there.
  int64_t batch_cap = 1;
  double epsilon = 0.1;
  double delta = 1e-5;
  // Standard deviation of the isotropic Gaussian random-walk proposal.
  double proposal_scale = 0.1;
  int64_t iters = 0;
  uint64_t seed = 0;

  absl::Status Validate() const;
};

}  // namespace dpmh

#endif  // DPMH_SAMPLER_CONFIG_H_
