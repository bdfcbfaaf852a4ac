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

#ifndef DPMH_DIAGNOSTICS_KERNEL_H_
#define DPMH_DIAGNOSTICS_KERNEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"
#include "dpmh/sampler.h"
#include "dpmh/sampler_config.h"

namespace dpmh::diagnostics {

// Monte Carlo estimate of a transition matrix on a finite state set, with
// uniform proposals over the other states.
struct KernelEstimate {
  std::vector<Vector> states;
  // Row-major S x S.
  std::vector<double> transition;
  std::vector<double> std_error;
  std::vector<int64_t> accept_counts;
  int64_t trials = 0;

  std::size_t size() const { return states.size(); }
  double at(std::size_t from, std::size_t to) const {
    return transition[from * size() + to];
  }
  double stderr_at(std::size_t from, std::size_t to) const {
    return std_error[from * size() + to];
  }
};

// For every ordered pair (x, y), x != y, runs `trials` single steps of the
// sampler's kernel from x with proposal y and records the acceptance
// frequency. T(x, y) = freq / (S - 1); the diagonal takes the rest. Pairs use
// independent streams derived from `seed`. At most 25 states.
absl::StatusOr<KernelEstimate> EstimateKernel(const Sampler& sampler,
                                              std::vector<Vector> states,
                                              int64_t trials, uint64_t seed);

// Exact target restricted to the states: pi(s) proportional to
// exp(LogPrior(s) - TotalEnergy(s)).
std::vector<double> StatePosterior(const EnergyModel& model,
                                   std::span<const Vector> states);

struct DetailedBalanceReport {
  // max over pairs of |pi(x) T(x, y) - pi(y) T(y, x)|.
  double max_residual = 0.0;
  // max over pairs of residual / propagated standard error.
  double max_z = 0.0;
  bool passes = false;
};

// A pair passes when its residual is within `z_limit` propagated standard
// errors (or below 1e-12 when both rows are exact).
DetailedBalanceReport CheckDetailedBalance(const KernelEstimate& kernel,
                                           std::span<const double> pi,
                                           double z_limit = 4.0);

struct GapEstimate {
  double gap = 0.0;
  // Delta-method standard error from the per-entry kernel errors.
  double std_error = 0.0;
  // Second-largest eigenvalue modulus.
  double slem = 0.0;
};

// 1 - SLEM of the pi-symmetrized kernel D^1/2 T D^-1/2. Returns
// FailedPrecondition when the estimate fails the detailed-balance gate.
absl::StatusOr<GapEstimate> SpectralGap(const KernelEstimate& kernel,
                                        std::span<const double> pi,
                                        double z_limit = 4.0);

// Left Perron vector of the estimated kernel, normalized to sum to one.
absl::StatusOr<std::vector<double>> StationaryDistribution(
    const KernelEstimate& kernel);

double TotalVariation(std::span<const double> p, std::span<const double> q);

// Standard normal CDF and its upper tail, both via erfc so that neither loses
// relative accuracy in its own tail.
double NormalCdf(double x);
double NormalUpperTail(double x);

// Closed-form lower bound on gap(private kernel) / gap(standard MH):
//   (1 - Phi(216 K^2 c_max^2 log(2.5 K c_max / (delta C))
//            log^2(1 + C A / lambda) / (epsilon^2 C^2)))
//   * exp(-C^2 A^2 / lambda - 2 sqrt(C^2 A^2 / lambda * log 2))
// The Phi argument is evaluated as shown, without simplification.
double SpectralGapRatioLowerBound(const SamplerConfig& config,
                                  double total_bound, double max_bound,
                                  double diameter);

}  // namespace dpmh::diagnostics

#endif  // DPMH_DIAGNOSTICS_KERNEL_H_
