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

#include "dpmh/energy_model.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpmh {

double EuclideanDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return std::sqrt(sum);
}

absl::Status BoxDomain::Validate(std::size_t dim) const {
  if (lower.size() != dim || upper.size() != dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("domain bounds must have ", dim, " entries, got ",
                     lower.size(), " and ", upper.size()));
  }
  for (std::size_t j = 0; j < dim; ++j) {
    if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) ||
        !(lower[j] < upper[j])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "domain coordinate ", j, " needs finite lower < upper, got [",
          lower[j], ", ", upper[j], "]"));
    }
  }
  return absl::OkStatus();
}

bool BoxDomain::Contains(std::span<const double> theta) const {
  if (theta.size() != lower.size()) return false;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    if (!(theta[j] >= lower[j] && theta[j] <= upper[j])) return false;
  }
  return true;
}

double BoxDomain::Diameter() const { return EuclideanDistance(lower, upper); }

Vector BoxDomain::Center() const {
  Vector center(lower.size());
  for (std::size_t j = 0; j < lower.size(); ++j) {
    center[j] = 0.5 * (lower[j] + upper[j]);
  }
  return center;
}

EnergyModel::EnergyModel(std::size_t dim, std::vector<double> raw_bounds,
                         double temperature, BoxDomain domain)
    : dim_(dim),
      raw_bounds_(std::move(raw_bounds)),
      temperature_(temperature),
      domain_(std::move(domain)),
      diameter_(domain_.Diameter()) {
  bounds_.reserve(raw_bounds_.size());
  for (double c : raw_bounds_) {
    const double tempered = c / temperature_;
    bounds_.push_back(tempered);
    total_bound_ += tempered;
    max_bound_ = std::max(max_bound_, tempered);
  }
}

double EnergyModel::TotalEnergy(std::span<const double> theta) const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += Energy(i, theta);
  return total;
}

absl::Status EnergyModel::ValidateCommon() const {
  if (dim_ == 0) return absl::InvalidArgumentError("model dimension is 0");
  if (raw_bounds_.empty()) {
    return absl::InvalidArgumentError("model has no data points");
  }
  if (!std::isfinite(temperature_) || !(temperature_ > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("temperature must be positive, got ", temperature_));
  }
  if (absl::Status s = domain_.Validate(dim_); !s.ok()) return s;
  for (std::size_t i = 0; i < raw_bounds_.size(); ++i) {
    if (!std::isfinite(raw_bounds_[i]) || !(raw_bounds_[i] > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "bound c_", i, " must be positive and finite, got ", raw_bounds_[i]));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> EnergyDiffSum(const EnergyModel& model,
                                     std::span<const double> theta,
                                     std::span<const double> theta_prime) {
  if (theta.size() != model.dim() || theta_prime.size() != model.dim()) {
    return absl::InvalidArgumentError("parameter dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    sum += model.Energy(i, theta) - model.Energy(i, theta_prime);
  }
  if (!std::isfinite(sum)) {
    return absl::InternalError("non-finite energy difference");
  }
  return sum;
}

absl::Status CheckBoundConsistency(const EnergyModel& model) {
  double total = 0.0;
  for (double c : model.bounds()) total += c;
  const double c = model.total_bound();
  if (std::abs(total - c) > 1e-9 * c) {
    return absl::InternalError(
        absl::StrCat("sum of bounds ", total, " differs from stored C = ", c));
  }
  return absl::OkStatus();
}

}  // namespace dpmh
