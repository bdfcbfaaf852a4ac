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

// Small models shared by the unit and acceptance tests.

#ifndef DPMH_TESTS_TEST_MODELS_H_
#define DPMH_TESTS_TEST_MODELS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"
#include "dpmh/logistic_model.h"
#include "dpmh/status_macros.h"

namespace dpmh::testing {

// One-dimensional model with U_i(theta) = slope_i * theta and declared bounds
// c_i. Declaring c_i < |slope_i| yields a model that violates its own bound.
class LinearModel : public EnergyModel {
 public:
  static absl::StatusOr<std::shared_ptr<const LinearModel>> Create(
      std::vector<double> slopes, std::vector<double> bounds, double lower,
      double upper) {
    auto model = std::shared_ptr<LinearModel>(new LinearModel(
        std::move(slopes), std::move(bounds), BoxDomain{{lower}, {upper}}));
    RETURN_IF_ERROR(model->ValidateCommon());
    return std::shared_ptr<const LinearModel>(std::move(model));
  }

  double RawEnergy(std::size_t i,
                   std::span<const double> theta) const override {
    return slopes_[i] * theta[0];
  }

 private:
  LinearModel(std::vector<double> slopes, std::vector<double> bounds,
              BoxDomain domain)
      : EnergyModel(1, std::move(bounds), 1.0, std::move(domain)),
        slopes_(std::move(slopes)) {}

  std::vector<double> slopes_;
};

// Three-point one-dimensional logistic regression with x = (1, 2, 3) and
// labels (1, 1, 0).
inline absl::StatusOr<std::shared_ptr<const LogisticRegressionModel>>
LogisticToy(double temperature, double lower, double upper) {
  LabeledData data;
  data.dim = 1;
  data.features = {1.0, 2.0, 3.0};
  data.labels = {1, 1, 0};
  return LogisticRegressionModel::Create(std::move(data), temperature,
                                         BoxDomain{{lower}, {upper}});
}

// One-dimensional logistic regression with n copies of feature x, the first
// `positives` labelled 1. Every datum has bound |x|, so C / c_max = n.
inline absl::StatusOr<std::shared_ptr<const LogisticRegressionModel>>
LogisticRamp(int64_t n, int64_t positives, double x, double lower,
             double upper) {
  LabeledData data;
  data.dim = 1;
  data.features.assign(static_cast<std::size_t>(n), x);
  data.labels.assign(static_cast<std::size_t>(n), 0);
  for (int64_t i = 0; i < positives && i < n; ++i) data.labels[i] = 1;
  return LogisticRegressionModel::Create(std::move(data), 1.0,
                                         BoxDomain{{lower}, {upper}});
}

}  // namespace dpmh::testing

#endif  // DPMH_TESTS_TEST_MODELS_H_
