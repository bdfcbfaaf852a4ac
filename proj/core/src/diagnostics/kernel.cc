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

#include "dpmh/diagnostics/kernel.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpmh/random.h"
#include "dpmh/status_macros.h"

namespace dpmh::diagnostics {
namespace {

constexpr std::size_t kMaxStates = 25;
constexpr double kExactResidual = 1e-12;

Eigen::MatrixXd ToMatrix(const KernelEstimate& kernel) {
  const auto s = static_cast<Eigen::Index>(kernel.size());
  Eigen::MatrixXd t(s, s);
  for (Eigen::Index x = 0; x < s; ++x) {
    for (Eigen::Index y = 0; y < s; ++y) t(x, y) = kernel.at(x, y);
  }
  return t;
}

}  // namespace

absl::StatusOr<KernelEstimate> EstimateKernel(const Sampler& sampler,
                                              std::vector<Vector> states,
                                              int64_t trials, uint64_t seed) {
  const std::size_t s = states.size();
  if (s < 2 || s > kMaxStates) {
    return absl::InvalidArgumentError(absl::StrCat(
        "kernel estimation needs 2 to ", kMaxStates, " states, got ", s));
  }
  if (trials < 1) {
    return absl::InvalidArgumentError("trials must be at least 1");
  }
  const EnergyModel& model = sampler.model();
  std::vector<double> energies(s);
  for (std::size_t x = 0; x < s; ++x) {
    if (states[x].size() != model.dim() ||
        !model.domain().Contains(states[x])) {
      return absl::InvalidArgumentError(
          absl::StrCat("state ", x, " is outside the model domain"));
    }
    energies[x] = model.TotalEnergy(states[x]);
  }

  KernelEstimate kernel;
  kernel.trials = trials;
  kernel.transition.assign(s * s, 0.0);
  kernel.std_error.assign(s * s, 0.0);
  kernel.accept_counts.assign(s * s, 0);
  const double n = static_cast<double>(trials);
  const double others = static_cast<double>(s - 1);
  for (std::size_t x = 0; x < s; ++x) {
    double off_diagonal = 0.0;
    double off_variance = 0.0;
    for (std::size_t y = 0; y < s; ++y) {
      if (x == y) continue;
      ASSIGN_OR_RETURN(ChainState state,
                       sampler.Init(states[x], HashCombine(seed, x * s + y)));
      const Proposal proposal{states[y], energies[y]};
      int64_t accepted = 0;
      for (int64_t t = 0; t < trials; ++t) {
        state.theta = states[x];
        state.total_energy = energies[x];
        ASSIGN_OR_RETURN(StepRecord record,
                         sampler.StepWithProposal(state, proposal));
        accepted += record.accepted ? 1 : 0;
      }
      const std::size_t at = x * s + y;
      kernel.accept_counts[at] = accepted;
      kernel.transition[at] = static_cast<double>(accepted) / n / others;
      // Add-one/add-two shrinkage keeps the error positive at 0 or n hits.
      const double shrunk = (static_cast<double>(accepted) + 1.0) / (n + 2.0);
      kernel.std_error[at] = std::sqrt(shrunk * (1.0 - shrunk) / n) / others;
      off_diagonal += kernel.transition[at];
      off_variance += kernel.std_error[at] * kernel.std_error[at];
    }
    kernel.transition[x * s + x] = 1.0 - off_diagonal;
    kernel.std_error[x * s + x] = std::sqrt(off_variance);
  }
  kernel.states = std::move(states);
  return kernel;
}

std::vector<double> StatePosterior(const EnergyModel& model,
                                   std::span<const Vector> states) {
  std::vector<double> log_density(states.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < states.size(); ++x) {
    log_density[x] = model.LogPrior(states[x]) - model.TotalEnergy(states[x]);
    max_log = std::max(max_log, log_density[x]);
  }
  std::vector<double> pi(states.size());
  double total = 0.0;
  for (std::size_t x = 0; x < states.size(); ++x) {
    pi[x] = std::exp(log_density[x] - max_log);
    total += pi[x];
  }
  for (double& p : pi) p /= total;
  return pi;
}

DetailedBalanceReport CheckDetailedBalance(const KernelEstimate& kernel,
                                           std::span<const double> pi,
                                           double z_limit) {
  DetailedBalanceReport report;
  report.passes = pi.size() == kernel.size();
  if (!report.passes) return report;
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    for (std::size_t y = x + 1; y < kernel.size(); ++y) {
      const double residual =
          std::abs(pi[x] * kernel.at(x, y) - pi[y] * kernel.at(y, x));
      const double se = std::hypot(pi[x] * kernel.stderr_at(x, y),
                                   pi[y] * kernel.stderr_at(y, x));
      report.max_residual = std::max(report.max_residual, residual);
      if (residual <= kExactResidual) continue;
      const double z =
          se > 0.0 ? residual / se : std::numeric_limits<double>::infinity();
      report.max_z = std::max(report.max_z, z);
      if (z > z_limit) report.passes = false;
    }
  }
  return report;
}

absl::StatusOr<GapEstimate> SpectralGap(const KernelEstimate& kernel,
                                        std::span<const double> pi,
                                        double z_limit) {
  const std::size_t s = kernel.size();
  if (pi.size() != s || s < 2) {
    return absl::InvalidArgumentError("pi must have one entry per state");
  }
  for (double p : pi) {
    if (!(p > 0.0)) {
      return absl::InvalidArgumentError("pi must be strictly positive");
    }
  }
  const DetailedBalanceReport balance =
      CheckDetailedBalance(kernel, pi, z_limit);
  if (!balance.passes) {
    return absl::FailedPreconditionError(absl::StrCat(
        "kernel estimate is not reversible with respect to pi (max z = ",
        balance.max_z, "); no spectral gap reported"));
  }
  const Eigen::MatrixXd t = ToMatrix(kernel);
  Eigen::VectorXd sqrt_pi(static_cast<Eigen::Index>(s));
  for (std::size_t x = 0; x < s; ++x) sqrt_pi(x) = std::sqrt(pi[x]);
  Eigen::MatrixXd sym =
      sqrt_pi.asDiagonal() * t * sqrt_pi.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigen decomposition failed");
  }
  // Ascending eigenvalues; the last is the Perron root.
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::Index n = values.size();
  const Eigen::Index second = n - 2;
  const Eigen::Index pick =
      std::abs(values(0)) > std::abs(values(second)) ? 0 : second;
  GapEstimate out;
  out.slem = std::abs(values(pick));
  out.gap = 1.0 - out.slem;
  const Eigen::VectorXd u = solver.eigenvectors().col(pick);
  double variance = 0.0;
  for (std::size_t x = 0; x < s; ++x) {
    for (std::size_t y = 0; y < s; ++y) {
      if (x == y) continue;
      const double g = std::sqrt(pi[x] / pi[y]) * u(x) * u(y) - u(x) * u(x);
      const double se = kernel.stderr_at(x, y);
      variance += g * g * se * se;
    }
  }
  out.std_error = std::sqrt(variance);
  return out;
}

absl::StatusOr<std::vector<double>> StationaryDistribution(
    const KernelEstimate& kernel) {
  const Eigen::MatrixXd t = ToMatrix(kernel);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(t.transpose());
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigen decomposition failed");
  }
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < solver.eigenvalues().size(); ++k) {
    if (std::abs(solver.eigenvalues()(k) - 1.0) <
        std::abs(solver.eigenvalues()(best) - 1.0)) {
      best = k;
    }
  }
  const Eigen::VectorXcd v = solver.eigenvectors().col(best);
  std::vector<double> pi(kernel.size());
  double total = 0.0;
  for (std::size_t x = 0; x < kernel.size(); ++x) {
    pi[x] = v(static_cast<Eigen::Index>(x)).real();
    total += pi[x];
  }
  if (total == 0.0 || !std::isfinite(total)) {
    return absl::InternalError("degenerate stationary vector");
  }
  for (double& p : pi) p /= total;
  return pi;
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalUpperTail(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double SpectralGapRatioLowerBound(const SamplerConfig& config,
                                  double total_bound, double max_bound,
                                  double diameter) {
  const double k = static_cast<double>(config.batch_cap);
  const double c = total_bound;
  const double eps = config.epsilon;
  const double log_ratio = std::log(2.5 * k * max_bound / (config.delta * c));
  const double log_growth = std::log1p(c * diameter / config.lambda);
  const double phi_arg = 216.0 * k * k * max_bound * max_bound * log_ratio *
                         log_growth * log_growth / (eps * eps * c * c);
  const double u = c * c * diameter * diameter / config.lambda;
  return NormalUpperTail(phi_arg) *
         std::exp(-u - 2.0 * std::sqrt(u * std::numbers::ln2));
}

}  // namespace dpmh::diagnostics
