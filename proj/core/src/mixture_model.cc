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

#include "dpmh/mixture_model.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "dpmh/csv.h"
#include "dpmh/random.h"

namespace dpmh {

absl::StatusOr<std::shared_ptr<const MixtureModel>> MixtureModel::Create(
    std::vector<double> data, double sigma_x2, double temperature,
    BoxDomain domain) {
  if (!std::isfinite(sigma_x2) || !(sigma_x2 > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma_x2 must be positive, got ", sigma_x2));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] >= kMixtureDataLower && data[i] <= kMixtureDataUpper)) {
      return absl::InvalidArgumentError(
          absl::StrCat("mixture data point ", i, " = ", data[i], " outside [",
                       kMixtureDataLower, ", ", kMixtureDataUpper, "]"));
    }
  }
  if (domain.lower.size() == 2 && domain.upper.size() == 2) {
    for (std::size_t j = 0; j < 2; ++j) {
      if (domain.lower[j] < -kMixtureParamLimit ||
          domain.upper[j] > kMixtureParamLimit) {
        return absl::InvalidArgumentError(absl::StrCat(
            "mixture domain must lie inside [-", kMixtureParamLimit, ", ",
            kMixtureParamLimit, "]^2 for the Lipschitz bound to hold"));
      }
    }
  }
  std::vector<double> raw_bounds;
  raw_bounds.reserve(data.size());
  for (double x : data) raw_bounds.push_back(LipschitzBound(x, sigma_x2));
  std::shared_ptr<const MixtureModel> model(
      new MixtureModel(std::move(data), std::move(raw_bounds), sigma_x2,
                       temperature, std::move(domain)));
  if (absl::Status s = model->ValidateCommon(); !s.ok()) return s;
  return model;
}

double MixtureModel::LipschitzBound(double x, double sigma_x2) {
  const double a = (2.0 * std::abs(x) + 9.0) / sigma_x2;
  const double b = (std::abs(x) + 6.0) / sigma_x2;
  return std::sqrt(a * a + b * b);
}

MixtureModel::MixtureModel(std::vector<double> data,
                           std::vector<double> raw_bounds, double sigma_x2,
                           double temperature, BoxDomain domain)
    : EnergyModel(2, std::move(raw_bounds), temperature, std::move(domain)),
      data_(std::move(data)),
      sigma_x2_(sigma_x2),
      log_normalizer_(
          std::log(2.0 * std::sqrt(2.0 * std::numbers::pi * sigma_x2))) {}

double MixtureModel::RawEnergy(std::size_t i,
                               std::span<const double> theta) const {
  const double x = data_[i];
  const double d1 = x - theta[0];
  const double d2 = x - theta[0] - theta[1];
  const double a = -d1 * d1 / (2.0 * sigma_x2_);
  const double b = -d2 * d2 / (2.0 * sigma_x2_);
  const double hi = std::max(a, b);
  const double log_sum = hi + std::log1p(std::exp(std::min(a, b) - hi));
  return log_normalizer_ - log_sum;
}

absl::StatusOr<std::vector<double>> GenerateMixtureData(
    int64_t n, uint64_t seed, const MixtureParams& params) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("n must be at least 1, got ", n));
  }
  if (!(params.sigma_x2 > 0.0)) {
    return absl::InvalidArgumentError("sigma_x2 must be positive");
  }
  Rng rng(seed);
  const double sd = std::sqrt(params.sigma_x2);
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    int attempts = 0;
    while (true) {
      if (++attempts > 1000000) {
        return absl::InternalError(
            "mixture truncation rejected 1e6 draws in a row");
      }
      const double mean =
          rng.Uniform() < 0.5 ? params.theta1 : params.theta1 + params.theta2;
      const double x = mean + sd * rng.Normal();
      if (x >= kMixtureDataLower && x <= kMixtureDataUpper) {
        data.push_back(x);
        break;
      }
    }
  }
  return data;
}

absl::Status WriteMixtureData(const std::string& path,
                              std::span<const double> data) {
  std::ofstream out(path);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  for (double x : data) out << FormatDouble(x) << '\n';
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> ReadMixtureData(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::vector<double> data;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (TrimWhitespace(line).empty()) continue;
    absl::StatusOr<double> x = ParseDouble(line);
    if (!x.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_number, ": ", x.status().message()));
    }
    data.push_back(*x);
  }
  if (data.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": no data"));
  }
  return data;
}

}  // namespace dpmh
