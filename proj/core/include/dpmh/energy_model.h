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

#ifndef DPMH_ENERGY_MODEL_H_
#define DPMH_ENERGY_MODEL_H_

#include <cstddef>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpmh {

using Vector = std::vector<double>;

double EuclideanDistance(std::span<const double> a, std::span<const double> b);

// Axis-aligned box used as the parameter domain. Its diagonal is the global
// distance bound A: every pair of points inside satisfies M(a, b) <= A.
struct BoxDomain {
  Vector lower;
  Vector upper;

  absl::Status Validate(std::size_t dim) const;
  bool Contains(std::span<const double> theta) const;
  double Diameter() const;
  Vector Center() const;
};

// A posterior exp(-sum_i U_i(theta)) on a bounded domain, where every energy
// term satisfies |U_i(a) - U_i(b)| <= c_i * M(a, b).
//
// Energies and bounds returned by the public accessors are tempered: both are
// divided by temperature(). Subclasses supply untempered RawEnergy() and raw
// bounds. Instances are immutable after construction and safe to share
// between concurrently running chains.
class EnergyModel {
 public:
  virtual ~EnergyModel() = default;

  std::size_t size() const { return raw_bounds_.size(); }
  std::size_t dim() const { return dim_; }
  double temperature() const { return temperature_; }
  const BoxDomain& domain() const { return domain_; }
  // Global bound A on M over the domain.
  double domain_diameter() const { return diameter_; }

  double Energy(std::size_t i, std::span<const double> theta) const {
    return RawEnergy(i, theta) / temperature_;
  }
  // sum_i Energy(i, theta), accumulated in index order.
  double TotalEnergy(std::span<const double> theta) const;

  double bound(std::size_t i) const { return bounds_[i]; }
  std::span<const double> bounds() const { return bounds_; }
  std::span<const double> raw_bounds() const { return raw_bounds_; }
  // C = sum_i c_i (tempered).
  double total_bound() const { return total_bound_; }
  double max_bound() const { return max_bound_; }

  // M(a, b). Euclidean unless overridden; must be symmetric.
  virtual double Distance(std::span<const double> a,
                          std::span<const double> b) const {
    return EuclideanDistance(a, b);
  }
  // Log prior density on the domain. Flat by default.
  virtual double LogPrior(std::span<const double> theta) const {
    (void)theta;
    return 0.0;
  }
  virtual double RawEnergy(std::size_t i,
                           std::span<const double> theta) const = 0;

 protected:
  EnergyModel(std::size_t dim, std::vector<double> raw_bounds,
              double temperature, BoxDomain domain);

  // Checks the invariants shared by every model. Factories call this before
  // handing out an instance.
  absl::Status ValidateCommon() const;

 private:
  std::size_t dim_;
  std::vector<double> raw_bounds_;
  std::vector<double> bounds_;
  double temperature_;
  BoxDomain domain_;
  double diameter_;
  double total_bound_ = 0.0;
  double max_bound_ = 0.0;
};

// sum_i (U_i(theta) - U_i(theta_prime)), tempered.
absl::StatusOr<double> EnergyDiffSum(const EnergyModel& model,
                                     std::span<const double> theta,
                                     std::span<const double> theta_prime);

// Recomputes C from the stored bounds and compares with total_bound() to
// within 1e-9 * C.
absl::Status CheckBoundConsistency(const EnergyModel& model);

}  // namespace dpmh

#endif  // DPMH_ENERGY_MODEL_H_
