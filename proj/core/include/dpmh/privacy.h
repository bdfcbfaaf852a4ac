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

#ifndef DPMH_PRIVACY_H_
#define DPMH_PRIVACY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpmh {

struct EpsilonDelta {
  double epsilon = 0.0;
  double delta = 0.0;
};

// Sensitivity of the minibatch log-ratio 2 sum artanh(...) to replacing one
// record: 2 log(1 + C M / lambda).
absl::StatusOr<double> SensitivityL1(double total_bound, double distance,
                                     double lambda);

// Sensitivity of the full-batch log-ratio: 2 max_i c_i M.
double SensitivityL2(double max_bound, double distance);

// Per-iteration noise scales. Noise on the minibatch branch has standard
// deviation sigma1 * Delta(l1); on the full-batch branch sigma2 * Delta(l2).
// A branch adds no noise when its sensitivity is at or below its free
// threshold.
struct NoiseCalibration {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double free_threshold_minibatch = 0.0;
  double free_threshold_fullbatch = 0.0;
};

// sigma2 = sqrt(2 log(1.25 / delta)) / epsilon
// sigma1 = 6 K c_max sqrt(2 log(2.5 K c_max / (delta C))) / (epsilon C)
// Requires epsilon, delta in (0, 1). With batch_cap == 0 the minibatch branch
// is unreachable and sigma1 and its threshold are reported as 0.
absl::StatusOr<NoiseCalibration> Calibrate(double epsilon, double delta,
                                           int64_t batch_cap,
                                           double total_bound,
                                           double max_bound);

// Guarantee of an (epsilon, delta)-DP minibatch mechanism after the
// with-replacement, non-uniform subsampling step, with at most `batch_cap`
// draws and per-draw inclusion probability at most p.
struct AmplifiedGuarantee {
  // K log((1 - p + p e^eps) / (1 - p + p e^-eps))
  double epsilon = 0.0;
  // delta / (e^eps - 1) * ((1 - p + p e^eps)^K - 1)
  double delta = 0.0;
  // Simplified bounds 6 K p eps and 2 K p delta.
  double epsilon_bound = 0.0;
  double delta_bound = 0.0;
  // Whether the exact values sit below the simplified bounds. The delta bound
  // only holds while K p (e^eps - 1) stays small; callers that rely on the
  // simplified form should check this flag.
  bool within_bounds = false;
};

absl::StatusOr<AmplifiedGuarantee> AmplifySubsampled(double epsilon,
                                                     double delta, double p,
                                                     int64_t batch_cap);

// Advanced composition of T mechanisms, each (eps_step, delta_step)-DP:
//   eps   = sqrt(2 T log(1 / delta_slack)) eps_step + T eps_step (e^eps_step -
//   1) delta = T delta_step + delta_slack
absl::StatusOr<EpsilonDelta> ComposeAdvanced(double eps_step, double delta_step,
                                             int64_t steps, double delta_slack);

struct LedgerEntry {
  int64_t iter = 0;
  double eps_step = 0.0;
  double delta_step = 0.0;
  double eps_total = 0.0;
  double delta_total = 0.0;
};

// Running per-step spend and composed totals for one chain. Steps that spend
// nothing (rejected before touching data) are listed but not composed.
// Single writer.
class PrivacyLedger {
 public:
  explicit PrivacyLedger(double delta_slack);

  void Record(int64_t iter, double eps_step, double delta_step);

  // Number of composed (charged) steps T.
  int64_t composed_steps() const { return composed_steps_; }
  EpsilonDelta totals() const;
  double delta_slack() const { return delta_slack_; }
  const std::vector<LedgerEntry>& entries() const { return entries_; }

 private:
  double delta_slack_;
  int64_t composed_steps_ = 0;
  double max_eps_step_ = 0.0;
  double max_delta_step_ = 0.0;
  std::vector<LedgerEntry> entries_;
};

// CSV with header iter,eps_step,delta_step,eps_total,delta_total.
absl::Status WriteLedgerCsv(const std::string& path,
                            const PrivacyLedger& ledger);

}  // namespace dpmh

#endif  // DPMH_PRIVACY_H_
