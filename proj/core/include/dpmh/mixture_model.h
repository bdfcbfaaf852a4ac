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

#ifndef DPMH_MIXTURE_MODEL_H_
#define DPMH_MIXTURE_MODEL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmh/energy_model.h"

namespace dpmh {

// Generating parameters of the two-component location mixture
//   x ~ 0.5 N(theta1, sigma_x2) + 0.5 N(theta1 + theta2, sigma_x2),
// truncated to [kMixtureDataLower, kMixtureDataUpper].
struct MixtureParams {
  double theta1 = 0.0;
  double theta2 = 1.0;
  double sigma_x2 = 2.0;
};

inline constexpr double kMixtureDataLower = -3.0;
inline constexpr double kMixtureDataUpper = 3.0;
// The Lipschitz bound below holds for parameters inside this box.
inline constexpr double kMixtureParamLimit = 3.0;

// Posterior over (theta1, theta2) for the truncated mixture under a flat
// prior. U_i is the negative log-likelihood of x_i; c_i is the closed-form
// gradient-norm bound valid for |theta_j| <= 3 and |x_i| <= 3.
class MixtureModel : public EnergyModel {
 public:
  static absl::StatusOr<std::shared_ptr<const MixtureModel>> Create(
      std::vector<double> data, double sigma_x2, double temperature,
      BoxDomain domain);

  static double LipschitzBound(double x, double sigma_x2);

  double RawEnergy(std::size_t i, std::span<const double> theta) const override;

  std::span<const double> data() const { return data_; }
  double sigma_x2() const { return sigma_x2_; }

 private:
  MixtureModel(std::vector<double> data, std::vector<double> raw_bounds,
               double sigma_x2, double temperature, BoxDomain domain);

  std::vector<double> data_;
  double sigma_x2_;
  double log_normalizer_;
};

// Draws n points from the truncated mixture by rejection. Deterministic given
// seed. Fails with InvalidArgument for n < 1 and Internal if a single point
// needs more than 1e6 attempts.
absl::StatusOr<std::vector<double>> GenerateMixtureData(
    int64_t n, uint64_t seed, const MixtureParams& params = {});

// One value per line, shortest round-trip form.
absl::Status WriteMixtureData(const std::string& path,
                              std::span<const double> data);
absl::StatusOr<std::vector<double>> ReadMixtureData(const std::string& path);

}  // namespace dpmh

#endif  // DPMH_MIXTURE_MODEL_H_
