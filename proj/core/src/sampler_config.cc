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

#include "dpmh/sampler_config.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpmh {

const char* ModeName(SamplerMode mode) {
  switch (mode) {
    case SamplerMode::kMh:
      return "mh";
    case SamplerMode::kTunaMh:
      return "tunamh";
    case SamplerMode::kDpFast:
      return "dpfast";
    case SamplerMode::kDpFastFullBatch:
      return "dpfast_fullbatch";
    case SamplerMode::kPenalty:
      return "penalty";
  }
  return "unknown";
}

absl::StatusOr<SamplerMode> ParseMode(std::string_view name) {
  for (SamplerMode mode :
       {SamplerMode::kMh, SamplerMode::kTunaMh, SamplerMode::kDpFast,
        SamplerMode::kDpFastFullBatch, SamplerMode::kPenalty}) {
    if (ModeName(mode) == name) return mode;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown sampler mode '", std::string(name),
      "' (expected mh, tunamh, dpfast, dpfast_fullbatch or penalty)"));
}

bool ModeIsPrivate(SamplerMode mode) {
  return mode == SamplerMode::kDpFast ||
         mode == SamplerMode::kDpFastFullBatch || mode == SamplerMode::kPenalty;
}

bool ModeDrawsBatchSize(SamplerMode mode) {
  return mode == SamplerMode::kTunaMh || mode == SamplerMode::kDpFast;
}

absl::Status SamplerConfig::Validate() const {
  if (ModeDrawsBatchSize(mode) && !(lambda > 0.0 && std::isfinite(lambda))) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be positive, got ", lambda));
  }
  if (batch_cap < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("batch_cap must be nonnegative, got ", batch_cap));
  }
  if (ModeIsPrivate(mode)) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon must lie in (0, 1], got ", epsilon));
    }
    if (!(delta > 0.0 && delta < 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("delta must lie in (0, 1), got ", delta));
    }
  }
  if (!(proposal_scale > 0.0 && std::isfinite(proposal_scale))) {
    return absl::InvalidArgumentError(
        absl::StrCat("proposal_scale must be positive, got ", proposal_scale));
  }
  if (iters < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("iters must be nonnegative, got ", iters));
  }
  return absl::OkStatus();
}

}  // namespace dpmh
