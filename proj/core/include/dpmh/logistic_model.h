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

#ifndef DPMH_LOGISTIC_MODEL_H_
#define DPMH_LOGISTIC_MODEL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"

namespace dpmh {

// Row-major feature matrix with binary labels.
struct LabeledData {
  std::size_t dim = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
};

double Sigmoid(double z);
// log(1 + exp(z)) without overflow.
double Softplus(double z);

// Bayesian logistic regression with a flat prior on a box.
//   U_i(theta) = -y_i log h(theta.x_i) - (1 - y_i) log h(-theta.x_i)
// with c_i = ||x_i||_2, which bounds the gradient norm of U_i everywhere.
class LogisticRegressionModel : public EnergyModel {
 public:
  // Rejects rows with zero norm: every c_i must be positive.
  static absl::StatusOr<std::shared_ptr<const LogisticRegressionModel>> Create(
      LabeledData data, double temperature, BoxDomain domain);

  double RawEnergy(std::size_t i, std::span<const double> theta) const override;

  const LabeledData& data() const { return data_; }

 private:
  LogisticRegressionModel(LabeledData data, std::vector<double> raw_bounds,
                          double temperature, BoxDomain domain);

  LabeledData data_;
};

// Parses a feature CSV: a header row, numeric feature columns, and a final
// label column in {0, 1}. Errors name the 1-based line number.
absl::StatusOr<LabeledData> LoadFeatureCsv(const std::string& path);
absl::Status WriteFeatureCsv(const std::string& path, const LabeledData& data);

// Gaussian features (unit variance per coordinate, plus `bias` added to every
// coordinate) and labels y ~ Bernoulli(h(theta_true . x)).
absl::StatusOr<LabeledData> GenerateLogisticData(
    int64_t n, std::span<const double> theta_true, uint64_t seed,
    double bias = 0.0);

}  // namespace dpmh

#endif  // DPMH_LOGISTIC_MODEL_H_
