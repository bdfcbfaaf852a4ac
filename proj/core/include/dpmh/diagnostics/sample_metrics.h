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

#ifndef DPMH_DIAGNOSTICS_SAMPLE_METRICS_H_
#define DPMH_DIAGNOSTICS_SAMPLE_METRICS_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpmh/diagnostics/grid_posterior.h"
#include "dpmh/energy_model.h"
#include "dpmh/logistic_model.h"
#include "dpmh/sampler.h"

namespace dpmh::diagnostics {

inline constexpr double kHistogramSmoothing = 1e-6;
inline constexpr double kDefaultBurnIn = 0.2;

// Drops the first floor(fraction * size) records.
std::span<const StepRecord> PostBurnIn(std::span<const StepRecord> trace,
                                       double fraction);
std::vector<Vector> ThetaSamples(std::span<const StepRecord> trace);

// KL(p || q) + KL(q || p) after adding `smoothing` to every entry of both and
// renormalizing.
double SymmetricKl(std::span<const double> p, std::span<const double> q,
                   double smoothing = kHistogramSmoothing);

// Histogram of samples on the grid cells. Samples outside the grid are
// dropped; the second member counts them.
struct GridHistogram {
  std::vector<double> counts;
  int64_t outside = 0;
};
GridHistogram HistogramOnGrid(std::span<const Vector> samples,
                              const GridPosterior& grid);

// Symmetric KL between the smoothed sample histogram and the grid posterior.
// Fails if no sample lands inside the grid.
absl::StatusOr<double> SymmetricKlToGrid(
    std::span<const Vector> samples, const GridPosterior& grid,
    double smoothing = kHistogramSmoothing);

// Ties at probability exactly 0.5 predict label 1.
int PredictLabel(double probability);

// Accuracy of the posterior-mean predictive: the average of h(theta . x) over
// the samples, thresholded at 0.5.
absl::StatusOr<double> TestAccuracy(std::span<const Vector> samples,
                                    const LabeledData& holdout);

// Same predictor with the average taken under a grid posterior.
absl::StatusOr<double> GridPredictiveAccuracy(const GridPosterior& grid,
                                              const LabeledData& holdout);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int64_t count = 0;
};

// Sample mean with the iid standard error.
MeanEstimate MeanWithStderr(std::span<const double> values);

}  // namespace dpmh::diagnostics

#endif  // DPMH_DIAGNOSTICS_SAMPLE_METRICS_H_
