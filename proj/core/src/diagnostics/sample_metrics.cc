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

#include "dpmh/diagnostics/sample_metrics.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"

namespace dpmh::diagnostics {
namespace {

std::vector<double> Smoothed(std::span<const double> p, double smoothing) {
  std::vector<double> out(p.begin(), p.end());
  double total = 0.0;
  for (double& v : out) {
    v += smoothing;
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

double PosteriorMeanProbability(std::span<const Vector> thetas,
                                std::span<const double> weights,
                                std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t s = 0; s < thetas.size(); ++s) {
    double z = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) z += thetas[s][j] * x[j];
    sum += weights[s] * Sigmoid(z);
  }
  return sum;
}

absl::StatusOr<double> WeightedAccuracy(std::span<const Vector> thetas,
                                        std::span<const double> weights,
                                        const LabeledData& holdout) {
  if (holdout.size() == 0) {
    return absl::InvalidArgumentError("holdout set is empty");
  }
  if (thetas.empty()) return absl::InvalidArgumentError("no samples");
  for (const Vector& theta : thetas) {
    if (theta.size() != holdout.dim) {
      return absl::InvalidArgumentError("sample and feature dimension differ");
    }
  }
  int64_t correct = 0;
  for (std::size_t i = 0; i < holdout.size(); ++i) {
    const double p = PosteriorMeanProbability(thetas, weights, holdout.row(i));
    correct += PredictLabel(p) == holdout.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(holdout.size());
}

}  // namespace

std::span<const StepRecord> PostBurnIn(std::span<const StepRecord> trace,
                                       double fraction) {
  fraction = std::clamp(fraction, 0.0, 1.0);
  const auto skip = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(trace.size())));
  return trace.subspan(skip);
}

std::vector<Vector> ThetaSamples(std::span<const StepRecord> trace) {
  std::vector<Vector> samples;
  samples.reserve(trace.size());
  for (const StepRecord& record : trace) samples.push_back(record.theta);
  return samples;
}

double SymmetricKl(std::span<const double> p, std::span<const double> q,
                   double smoothing) {
  const std::vector<double> ps = Smoothed(p, smoothing);
  const std::vector<double> qs = Smoothed(q, smoothing);
  double kl = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    kl += (ps[i] - qs[i]) * (std::log(ps[i]) - std::log(qs[i]));
  }
  return kl;
}

GridHistogram HistogramOnGrid(std::span<const Vector> samples,
                              const GridPosterior& grid) {
  GridHistogram histogram;
  histogram.counts.assign(grid.cell_count(), 0.0);
  for (const Vector& theta : samples) {
    const std::optional<std::size_t> cell = grid.CellIndex(theta);
    if (cell.has_value()) {
      histogram.counts[*cell] += 1.0;
    } else {
      ++histogram.outside;
    }
  }
  return histogram;
}

absl::StatusOr<double> SymmetricKlToGrid(std::span<const Vector> samples,
                                         const GridPosterior& grid,
                                         double smoothing) {
  GridHistogram histogram = HistogramOnGrid(samples, grid);
  double inside = 0.0;
  for (double c : histogram.counts) inside += c;
  if (inside == 0.0) {
    return absl::FailedPreconditionError("no sample falls inside the grid");
  }
  for (double& c : histogram.counts) c /= inside;
  return SymmetricKl(histogram.counts, grid.probabilities(), smoothing);
}

int PredictLabel(double probability) { return probability >= 0.5 ? 1 : 0; }

absl::StatusOr<double> TestAccuracy(std::span<const Vector> samples,
                                    const LabeledData& holdout) {
  const std::vector<double> weights(
      samples.size(), samples.empty() ? 0.0 : 1.0 / samples.size());
  return WeightedAccuracy(samples, weights, holdout);
}

absl::StatusOr<double> GridPredictiveAccuracy(const GridPosterior& grid,
                                              const LabeledData& holdout) {
  std::vector<Vector> centers;
  centers.reserve(grid.cell_count());
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    centers.push_back(grid.CellCenter(c));
  }
  return WeightedAccuracy(centers, grid.probabilities(), holdout);
}

MeanEstimate MeanWithStderr(std::span<const double> values) {
  MeanEstimate out;
  out.count = static_cast<int64_t>(values.size());
  if (values.empty()) {
    out.mean = std::nan("");
    out.std_error = std::nan("");
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / values.size();
  if (values.size() < 2) {
    out.std_error = std::nan("");
    return out;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.std_error = std::sqrt(ss / (values.size() - 1) / values.size());
  return out;
}

}  // namespace dpmh::diagnostics
