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

#include "dpmh/logistic_model.h"

#include <cmath>
#include <fstream>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "dpmh/csv.h"
#include "dpmh/random.h"

namespace dpmh {

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

absl::StatusOr<std::shared_ptr<const LogisticRegressionModel>>
LogisticRegressionModel::Create(LabeledData data, double temperature,
                                BoxDomain domain) {
  if (data.dim == 0) {
    return absl::InvalidArgumentError("feature dimension is 0");
  }
  if (data.features.size() != data.labels.size() * data.dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature matrix has ", data.features.size(), " entries, expected ",
        data.labels.size(), " x ", data.dim));
  }
  std::vector<double> raw_bounds;
  raw_bounds.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.labels[i] != 0 && data.labels[i] != 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", i, " is not 0 or 1"));
    }
    double norm2 = 0.0;
    for (double v : data.row(i)) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("row ", i, " has a non-finite feature"));
      }
      norm2 += v * v;
    }
    if (norm2 == 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", i, " has zero norm; its Lipschitz bound would be 0"));
    }
    raw_bounds.push_back(std::sqrt(norm2));
  }
  const std::size_t dim = data.dim;
  std::shared_ptr<const LogisticRegressionModel> model(
      new LogisticRegressionModel(std::move(data), std::move(raw_bounds),
                                  temperature, std::move(domain)));
  if (absl::Status s = model->ValidateCommon(); !s.ok()) return s;
  if (model->dim() != dim) return absl::InternalError("dimension mismatch");
  return model;
}

LogisticRegressionModel::LogisticRegressionModel(LabeledData data,
                                                 std::vector<double> raw_bounds,
                                                 double temperature,
                                                 BoxDomain domain)
    : EnergyModel(data.dim, std::move(raw_bounds), temperature,
                  std::move(domain)),
      data_(std::move(data)) {}

double LogisticRegressionModel::RawEnergy(std::size_t i,
                                          std::span<const double> theta) const {
  const std::span<const double> x = data_.row(i);
  double z = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) z += theta[j] * x[j];
  // -log h(z) = softplus(-z); -log h(-z) = softplus(z).
  return data_.labels[i] == 1 ? Softplus(-z) : Softplus(z);
}

absl::StatusOr<LabeledData> LoadFeatureCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": missing header"));
  }
  const std::size_t columns = SplitCsvLine(line).size();
  if (columns < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        path, ":1: need at least one feature column and a label column"));
  }
  LabeledData data;
  data.dim = columns - 1;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty()) continue;
    const std::vector<std::string_view> fields = SplitCsvLine(line);
    if (fields.size() != columns) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_number, ": expected ", columns,
                       " fields, got ", fields.size()));
    }
    for (std::size_t j = 0; j < data.dim; ++j) {
      absl::StatusOr<double> v = ParseDouble(fields[j]);
      if (!v.ok() || !std::isfinite(*v)) {
        return absl::InvalidArgumentError(absl::StrCat(
            path, ":", line_number, ": column ", j + 1,
            ": not a finite number: '", std::string(fields[j]), "'"));
      }
      data.features.push_back(*v);
    }
    absl::StatusOr<long long> label = ParseInt(fields.back());
    if (!label.ok() || (*label != 0 && *label != 1)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_number, ": label must be 0 or 1, got '",
                       std::string(fields.back()), "'"));
    }
    data.labels.push_back(static_cast<int>(*label));
  }
  if (data.labels.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no data rows"));
  }
  return data;
}

absl::Status WriteFeatureCsv(const std::string& path, const LabeledData& data) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  for (std::size_t j = 0; j < data.dim; ++j) out << 'x' << j << ',';
  out << "label\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << FormatDouble(v) << ',';
    out << data.labels[i] << '\n';
  }
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<LabeledData> GenerateLogisticData(
    int64_t n, std::span<const double> theta_true, uint64_t seed, double bias) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be at least 1, got ", n));
  }
  if (theta_true.empty()) {
    return absl::InvalidArgumentError("theta_true must be non-empty");
  }
  Rng rng(seed);
  LabeledData data;
  data.dim = theta_true.size();
  data.features.reserve(static_cast<std::size_t>(n) * data.dim);
  data.labels.reserve(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < data.dim; ++j) {
      const double v = rng.Normal() + bias;
      data.features.push_back(v);
      z += theta_true[j] * v;
    }
    data.labels.push_back(rng.Uniform() < Sigmoid(z) ? 1 : 0);
  }
  return data;
}

}  // namespace dpmh
