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

#include "dpmh/privacy.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpmh/csv.h"

namespace dpmh {
namespace {

absl::Status CheckUnitInterval(const char* name, double value) {
  if (!(value > 0.0 && value < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must lie in (0, 1), got ", value));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> SensitivityL1(double total_bound, double distance,
                                     double lambda) {
  if (!(lambda > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("lambda must be positive, got ", lambda));
  }
  return 2.0 * std::log1p(total_bound * distance / lambda);
}

double SensitivityL2(double max_bound, double distance) {
  return 2.0 * max_bound * distance;
}

absl::StatusOr<NoiseCalibration> Calibrate(double epsilon, double delta,
                                           int64_t batch_cap,
                                           double total_bound,
                                           double max_bound) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must lie in (0, 1], got ", epsilon));
  }
  if (absl::Status s = CheckUnitInterval("delta", delta); !s.ok()) return s;
  if (batch_cap < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("batch_cap must be nonnegative, got ", batch_cap));
  }
  if (!(total_bound > 0.0) || !(max_bound > 0.0)) {
    return absl::InvalidArgumentError("bounds C and max c_i must be positive");
  }
  NoiseCalibration calibration;
  calibration.sigma2 = std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
  calibration.free_threshold_fullbatch = epsilon;
  if (batch_cap > 0) {
    const double k_cmax = static_cast<double>(batch_cap) * max_bound;
    const double log_arg = 2.5 * k_cmax / (delta * total_bound);
    if (!(log_arg > 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "2.5 K max_c / (delta C) = ", log_arg,
          " must exceed 1 for the minibatch noise scale to be defined"));
    }
    calibration.sigma1 = 6.0 * k_cmax * std::sqrt(2.0 * std::log(log_arg)) /
                         (epsilon * total_bound);
    calibration.free_threshold_minibatch =
        epsilon * total_bound / (6.0 * k_cmax);
  }
  return calibration;
}

absl::StatusOr<AmplifiedGuarantee> AmplifySubsampled(double epsilon,
                                                     double delta, double p,
                                                     int64_t batch_cap) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (!(delta >= 0.0)) {
    return absl::InvalidArgumentError("delta must be nonnegative");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("inclusion probability p must lie in (0, 1], got ", p));
  }
  if (batch_cap < 1) {
    return absl::InvalidArgumentError("batch_cap must be at least 1");
  }
  const double k = static_cast<double>(batch_cap);
  // log(1 - p + p e^x) = log1p(p (e^x - 1)), accurate for small p.
  const double log_up = std::log1p(p * std::expm1(epsilon));
  const double log_down = std::log1p(p * std::expm1(-epsilon));
  AmplifiedGuarantee out;
  out.epsilon = k * (log_up - log_down);
  out.delta = delta / std::expm1(epsilon) * std::expm1(k * log_up);
  out.epsilon_bound = 6.0 * k * p * epsilon;
  out.delta_bound = 2.0 * k * p * delta;
  out.within_bounds =
      out.epsilon <= out.epsilon_bound && out.delta <= out.delta_bound;
  return out;
}

absl::StatusOr<EpsilonDelta> ComposeAdvanced(double eps_step, double delta_step,
                                             int64_t steps,
                                             double delta_slack) {
  if (steps < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("step count must be at least 1, got ", steps));
  }
  if (absl::Status s = CheckUnitInterval("delta_slack", delta_slack); !s.ok()) {
    return s;
  }
  if (!(eps_step >= 0.0) || !(delta_step >= 0.0)) {
    return absl::InvalidArgumentError("per-step spend must be nonnegative");
  }
  const double t = static_cast<double>(steps);
  EpsilonDelta out;
  if (std::isinf(eps_step)) {
    out.epsilon = eps_step;
  } else {
    out.epsilon = std::sqrt(2.0 * t * std::log(1.0 / delta_slack)) * eps_step +
                  t * eps_step * std::expm1(eps_step);
  }
  out.delta = t * delta_step + delta_slack;
  return out;
}

PrivacyLedger::PrivacyLedger(double delta_slack) : delta_slack_(delta_slack) {}

void PrivacyLedger::Record(int64_t iter, double eps_step, double delta_step) {
  LedgerEntry entry;
  entry.iter = iter;
  entry.eps_step = eps_step;
  entry.delta_step = delta_step;
  if (eps_step > 0.0 || delta_step > 0.0) {
    ++composed_steps_;
    max_eps_step_ = std::max(max_eps_step_, eps_step);
    max_delta_step_ = std::max(max_delta_step_, delta_step);
  }
  const EpsilonDelta totals = this->totals();
  entry.eps_total = totals.epsilon;
  entry.delta_total = totals.delta;
  entries_.push_back(entry);
}

EpsilonDelta PrivacyLedger::totals() const {
  if (composed_steps_ == 0) return {};
  // Every charged step is bounded by the largest per-step spend; composing
  // that bound over T steps covers the heterogeneous sequence.
  absl::StatusOr<EpsilonDelta> composed = ComposeAdvanced(
      max_eps_step_, max_delta_step_, composed_steps_, delta_slack_);
  if (!composed.ok()) {
    const double nan = std::nan("");
    return {nan, nan};
  }
  return *composed;
}

absl::Status WriteLedgerCsv(const std::string& path,
                            const PrivacyLedger& ledger) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  out << "iter,eps_step,delta_step,eps_total,delta_total\n";
  for (const LedgerEntry& e : ledger.entries()) {
    out << e.iter << ',' << FormatDouble(e.eps_step) << ','
        << FormatDouble(e.delta_step) << ',' << FormatDouble(e.eps_total) << ','
        << FormatDouble(e.delta_total) << '\n';
  }
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace dpmh
