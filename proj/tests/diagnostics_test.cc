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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "dpmh/diagnostics/grid_posterior.h"
#include "dpmh/diagnostics/kernel.h"
#include "dpmh/diagnostics/sample_metrics.h"
#include "dpmh/logistic_model.h"
#include "dpmh/mixture_model.h"
#include "dpmh/random.h"
#include "dpmh/sampler.h"
#include "gtest/gtest.h"
#include "oracles/high_precision.h"
#include "test_models.h"

namespace dpmh::diagnostics {
namespace {

using ::dpmh::testing::LinearModel;
using ::dpmh::testing::LogisticToy;

const GridAxis kMixtureAxis{-1.5, 2.5, 50};

std::shared_ptr<const MixtureModel> MixtureTask() {
  auto data = GenerateMixtureData(2000, 7);
  return *MixtureModel::Create(*data, 2.0, 100.0,
                               BoxDomain{{-1.5, -1.5}, {2.5, 2.5}});
}

// Cells whose mass is at least that of all eight neighbours, by mass.
std::vector<std::size_t> LocalMaxima(const GridPosterior& grid) {
  const int64_t n0 = grid.axes()[0].resolution;
  const int64_t n1 = grid.axes()[1].resolution;
  const auto p = grid.probabilities();
  std::vector<std::size_t> maxima;
  for (int64_t i = 0; i < n0; ++i) {
    for (int64_t j = 0; j < n1; ++j) {
      bool is_max = true;
      for (int64_t di = -1; di <= 1; ++di) {
        for (int64_t dj = -1; dj <= 1; ++dj) {
          const int64_t a = i + di, b = j + dj;
          if ((di == 0 && dj == 0) || a < 0 || b < 0 || a >= n0 || b >= n1) {
            continue;
          }
          is_max &= p[a * n1 + b] <= p[i * n1 + j];
        }
      }
      if (is_max) maxima.push_back(static_cast<std::size_t>(i * n1 + j));
    }
  }
  std::sort(maxima.begin(), maxima.end(),
            [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return maxima;
}

TEST(GridPosteriorTest, SingleCellHasAllMass) {
  auto model = *LogisticToy(1.0, -1.0, 1.0);
  auto grid = ComputeGridPosterior(*model, {GridAxis{-1.0, 1.0, 1}});
  ASSERT_TRUE(grid.ok()) << grid.status();
  ASSERT_EQ(grid->cell_count(), 1u);
  EXPECT_EQ(grid->probabilities()[0], 1.0);
}

TEST(GridPosteriorTest, SymmetricTargetGivesMirroredTable) {
  // Energies 2 theta and -2 theta sum to zero: a flat, symmetric target.
  auto model = *LinearModel::Create({2.0, -2.0}, {2.0, 2.0}, -1.0, 1.0);
  auto grid = ComputeGridPosterior(*model, {GridAxis{-1.0, 1.0, 10}});
  ASSERT_TRUE(grid.ok());
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(grid->probabilities()[k], grid->probabilities()[9 - k], 1e-15);
  }
  auto tilted = *LinearModel::Create({1.0}, {1.0}, -1.0, 1.0);
  auto even = ComputeGridPosterior(*tilted, {GridAxis{-1.0, 1.0, 10}});
  ASSERT_TRUE(even.ok());
  // exp(-theta) mirrors to exp(theta): p(k) p(9 - k) is constant.
  const auto p = even->probabilities();
  for (int k = 0; k < 10; ++k) {
    EXPECT_NEAR(p[k] * p[9 - k], p[0] * p[9], 1e-15);
  }
}

// The grid peak agrees with a direct search over the closed-form likelihood
// at the same cell centres.
TEST(GridPosteriorTest, MixturePeakMatchesDirectLikelihoodSearch) {
  auto model = MixtureTask();
  auto grid = ComputeGridPosterior(*model, {kMixtureAxis, kMixtureAxis});
  ASSERT_TRUE(grid.ok());
  const std::vector<std::size_t> maxima = LocalMaxima(*grid);
  ASSERT_FALSE(maxima.empty());
  const Vector peak = grid->CellCenter(maxima[0]);

  double best = -std::numeric_limits<double>::infinity();
  Vector best_theta;
  for (int64_t a = 0; a < 50; ++a) {
    for (int64_t b = 0; b < 50; ++b) {
      const double t1 = kMixtureAxis.center(a), t2 = kMixtureAxis.center(b);
      double log_lik = 0.0;
      for (double x : model->data()) {
        log_lik += std::log(std::exp(-(x - t1) * (x - t1) / 4.0) +
                            std::exp(-(x - t1 - t2) * (x - t1 - t2) / 4.0));
      }
      if (log_lik > best) {
        best = log_lik;
        best_theta = {t1, t2};
      }
    }
  }
  EXPECT_NEAR(peak[0], best_theta[0], 1e-12);
  EXPECT_NEAR(peak[1], best_theta[1], 1e-12);
}

TEST(GridPosteriorTest, CellIndexEdges) {
  auto model = MixtureTask();
  auto grid = ComputeGridPosterior(*model, {kMixtureAxis, kMixtureAxis});
  ASSERT_TRUE(grid.ok());
  EXPECT_EQ(grid->CellIndex(Vector{-1.5, -1.5}), 0u);
  EXPECT_EQ(grid->CellIndex(Vector{2.5, 2.5}), 2499u);
  EXPECT_FALSE(grid->CellIndex(Vector{2.6, 0.0}).has_value());
  EXPECT_EQ(grid->AxisIndices(51), (std::vector<int64_t>{1, 1}));
}

TEST(GridPosteriorTest, RejectsHighDimensionsAndEmptyAxes) {
  auto model = *LogisticToy(1.0, -1.0, 1.0);
  EXPECT_FALSE(ComputeGridPosterior(*model, {GridAxis{-1.0, 1.0, 0}}).ok());
  EXPECT_FALSE(ComputeGridPosterior(*model, {}).ok());
}

TEST(SymmetricKlTest, IdenticalIsZeroAndSymmetric) {
  const std::vector<double> p = {0.1, 0.2, 0.7};
  const std::vector<double> q = {0.3, 0.3, 0.4};
  EXPECT_NEAR(SymmetricKl(p, p), 0.0, 1e-15);
  EXPECT_NEAR(SymmetricKl(p, q), SymmetricKl(q, p), 1e-15);
  EXPECT_GT(SymmetricKl(p, q), 0.0);
}

TEST(SymmetricKlTest, PointMassAgainstUniform) {
  const std::vector<double> point = {1.0, 0.0, 0.0, 0.0};
  const std::vector<double> uniform = {0.25, 0.25, 0.25, 0.25};
  const double s = 1e-6;
  // Smoothed point mass: (1 + s) / (1 + 4 s) and s / (1 + 4 s) three times.
  const double hi = (1 + s) / (1 + 4 * s), lo = s / (1 + 4 * s);
  const double expected =
      (hi - 0.25) * std::log(hi / 0.25) + 3 * (lo - 0.25) * std::log(lo / 0.25);
  EXPECT_NEAR(SymmetricKl(point, uniform, s), expected, 1e-12);
}

TEST(SymmetricKlTest, ExactSamplesFromTheGridScoreNearZero) {
  auto model = MixtureTask();
  auto grid = ComputeGridPosterior(*model, {kMixtureAxis, kMixtureAxis});
  ASSERT_TRUE(grid.ok());
  AliasSampler cells(grid->probabilities());
  Rng rng(31);
  std::vector<Vector> samples;
  samples.reserve(1000000);
  for (int t = 0; t < 1000000; ++t) {
    samples.push_back(grid->CellCenter(cells.Sample(rng)));
  }
  auto kl = SymmetricKlToGrid(samples, *grid);
  ASSERT_TRUE(kl.ok());
  EXPECT_LT(*kl, 0.01);
}

TEST(SymmetricKlTest, NoSamplesInsideTheGridFails) {
  auto model = MixtureTask();
  auto grid = ComputeGridPosterior(*model, {kMixtureAxis, kMixtureAxis});
  ASSERT_TRUE(grid.ok());
  const std::vector<Vector> outside = {{5.0, 5.0}};
  EXPECT_EQ(SymmetricKlToGrid(outside, *grid).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(SampleMetricsTest, BurnInAndMean) {
  std::vector<StepRecord> trace(10);
  for (int i = 0; i < 10; ++i) trace[i].theta = {static_cast<double>(i)};
  const auto kept = PostBurnIn(trace, 0.25);
  ASSERT_EQ(kept.size(), 8u);
  EXPECT_EQ(ThetaSamples(kept)[0], (Vector{2.0}));
  const std::vector<double> values = {1.0, 2.0, 3.0, 4.0};
  const MeanEstimate m = MeanWithStderr(values);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(m.count, 4);
}

TEST(TestAccuracyTest, ZeroParameterPredictsTheTieLabel) {
  EXPECT_EQ(PredictLabel(0.5), 1);
  EXPECT_EQ(PredictLabel(0.49), 0);
  LabeledData holdout;
  holdout.dim = 1;
  holdout.features = {1.0, -2.0, 0.5, 3.0};
  holdout.labels = {1, 0, 0, 1};
  const std::vector<Vector> samples = {{0.0}};
  EXPECT_DOUBLE_EQ(*TestAccuracy(samples, holdout), 0.5);
}

TEST(TestAccuracyTest, SeparableHoldoutIsPerfect) {
  LabeledData holdout;
  holdout.dim = 1;
  holdout.features = {1.0, -1.0};
  holdout.labels = {1, 0};
  const std::vector<Vector> samples = {{5.0}};
  EXPECT_DOUBLE_EQ(*TestAccuracy(samples, holdout), 1.0);
}

TEST(TestAccuracyTest, MhChainMatchesGridPredictor) {
  const Vector theta_true = {1.5, -1.0};
  auto train = GenerateLogisticData(500, theta_true, 41);
  auto holdout = GenerateLogisticData(2000, theta_true, 42);
  ASSERT_TRUE(train.ok() && holdout.ok());
  auto model = *LogisticRegressionModel::Create(
      *train, 1.0, BoxDomain{{-3.0, -3.0}, {3.0, 3.0}});
  SamplerConfig config;
  config.mode = SamplerMode::kMh;
  config.proposal_scale = 0.15;
  config.seed = 43;
  Sampler sampler = *Sampler::Create(model, config);
  ChainState state = *sampler.Init(Vector{0.0, 0.0});
  ChainRun run = RunChain(sampler, state, 10000);
  ASSERT_TRUE(run.status.ok());
  const auto samples = ThetaSamples(PostBurnIn(run.trace, kDefaultBurnIn));
  const GridAxis axis{-3.0, 3.0, 60};
  auto grid = ComputeGridPosterior(*model, {axis, axis});
  ASSERT_TRUE(grid.ok());
  const double chain = *TestAccuracy(samples, *holdout);
  const double oracle = *GridPredictiveAccuracy(*grid, *holdout);
  EXPECT_NEAR(chain, oracle, 0.02);
}

KernelEstimate ManualKernel(std::vector<double> transition, double se) {
  KernelEstimate kernel;
  const std::size_t s =
      static_cast<std::size_t>(std::lround(std::sqrt(transition.size())));
  for (std::size_t i = 0; i < s; ++i) {
    kernel.states.push_back({static_cast<double>(i)});
  }
  kernel.std_error.assign(transition.size(), se);
  kernel.transition = std::move(transition);
  kernel.trials = 1;
  return kernel;
}

TEST(SpectralGapTest, IdentityKernelHasZeroGap) {
  const KernelEstimate kernel = ManualKernel({1, 0, 0, 0, 1, 0, 0, 0, 1}, 0.0);
  const std::vector<double> pi = {0.2, 0.3, 0.5};
  auto gap = SpectralGap(kernel, pi);
  ASSERT_TRUE(gap.ok()) << gap.status();
  EXPECT_NEAR(gap->gap, 0.0, 1e-12);
}

TEST(SpectralGapTest, TwoStateClosedForm) {
  const double a = 0.3, b = 0.45;
  const KernelEstimate kernel = ManualKernel({1 - a, a, b, 1 - b}, 0.0);
  const std::vector<double> pi = {b / (a + b), a / (a + b)};
  auto gap = SpectralGap(kernel, pi);
  ASSERT_TRUE(gap.ok()) << gap.status();
  EXPECT_NEAR(gap->gap, a + b, 1e-12);
}

TEST(SpectralGapTest, IndependentRowsHaveUnitGap) {
  const std::vector<double> pi = {0.2, 0.3, 0.5};
  std::vector<double> transition;
  for (int x = 0; x < 3; ++x)
    transition.insert(transition.end(), pi.begin(), pi.end());
  auto gap = SpectralGap(ManualKernel(transition, 0.0), pi);
  ASSERT_TRUE(gap.ok());
  EXPECT_NEAR(gap->gap, 1.0, 1e-12);
}

TEST(SpectralGapTest, NonReversibleKernelIsRefused) {
  const KernelEstimate cycle = ManualKernel({0, 1, 0, 0, 0, 1, 1, 0, 0}, 1e-3);
  const std::vector<double> pi = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const DetailedBalanceReport report = CheckDetailedBalance(cycle, pi);
  EXPECT_FALSE(report.passes);
  EXPECT_NEAR(report.max_residual, 1.0 / 3, 1e-12);
  EXPECT_EQ(SpectralGap(cycle, pi).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(StationaryDistributionTest, RecoversTwoStateTarget) {
  const double a = 0.3, b = 0.45;
  auto pi = StationaryDistribution(ManualKernel({1 - a, a, b, 1 - b}, 0.0));
  ASSERT_TRUE(pi.ok());
  EXPECT_NEAR((*pi)[0], b / (a + b), 1e-12);
  EXPECT_NEAR(
      TotalVariation(*pi, std::vector<double>{b / (a + b), a / (a + b)}), 0.0,
      1e-12);
}

// With every move free, the full-batch private kernel is standard MH, whose
// transition probabilities are min(1, pi(y) / pi(x)) / (S - 1).
TEST(EstimateKernelTest, FreeFullBatchMatchesClosedFormMh) {
  auto model = *LogisticToy(150.0, -2.0, 2.0);
  SamplerConfig config;
  config.mode = SamplerMode::kDpFastFullBatch;
  config.epsilon = 0.5;
  config.delta = 1e-5;
  config.proposal_scale = 1.0;
  Sampler sampler = *Sampler::Create(model, config);
  std::vector<Vector> states;
  for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) states.push_back({t});
  ASSERT_LE(2.0 * model->max_bound() * 4.0, config.epsilon);
  auto kernel = EstimateKernel(sampler, states, 20000, 51);
  ASSERT_TRUE(kernel.ok()) << kernel.status();
  const std::vector<double> pi = StatePosterior(*model, states);
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t y = 0; y < 5; ++y) {
      if (x == y) continue;
      const double exact = std::min(1.0, pi[y] / pi[x]) / 4.0;
      EXPECT_LE(std::abs(kernel->at(x, y) - exact),
                4.0 * kernel->stderr_at(x, y))
          << x << " -> " << y;
    }
  }
  const DetailedBalanceReport report = CheckDetailedBalance(*kernel, pi);
  EXPECT_TRUE(report.passes) << report.max_z;
  auto stationary = StationaryDistribution(*kernel);
  ASSERT_TRUE(stationary.ok());
  EXPECT_LT(TotalVariation(*stationary, pi), 0.02);
}

TEST(EstimateKernelTest, FlatTwoStateKernelIsDoublyStochastic) {
  auto model = *LinearModel::Create({2.0, -2.0}, {2.0, 2.0}, -1.0, 1.0);
  SamplerConfig config;
  config.mode = SamplerMode::kMh;
  Sampler sampler = *Sampler::Create(model, config);
  auto kernel = EstimateKernel(sampler, {{-0.5}, {0.5}}, 1000, 52);
  ASSERT_TRUE(kernel.ok());
  for (std::size_t y = 0; y < 2; ++y) {
    EXPECT_NEAR(
        kernel->at(0, y) + kernel->at(1, y), 1.0,
        4.0 * std::hypot(kernel->stderr_at(0, y), kernel->stderr_at(1, y)));
  }
}

TEST(EstimateKernelTest, RejectsBadStateSets) {
  auto model = *LogisticToy(1.0, -2.0, 2.0);
  SamplerConfig config;
  config.mode = SamplerMode::kMh;
  Sampler sampler = *Sampler::Create(model, config);
  EXPECT_FALSE(EstimateKernel(sampler, {{0.0}}, 10, 1).ok());
  EXPECT_FALSE(EstimateKernel(sampler, {{0.0}, {5.0}}, 10, 1).ok());
  EXPECT_FALSE(EstimateKernel(sampler, {{0.0}, {1.0}}, 0, 1).ok());
}

TEST(NormalTest, CdfAndTail) {
  EXPECT_DOUBLE_EQ(NormalCdf(0.0), 0.5);
  EXPECT_NEAR(NormalCdf(1.96), 0.9750021048517795, 1e-15);
  EXPECT_NEAR(NormalUpperTail(10.0) / 7.619853024160527e-24, 1.0, 1e-12);
}

SamplerConfig BoundConfig(double epsilon, int64_t k, double lambda) {
  SamplerConfig config;
  config.mode = SamplerMode::kDpFast;
  config.epsilon = epsilon;
  config.delta = 1e-5;
  config.batch_cap = k;
  config.lambda = lambda;
  return config;
}

TEST(GapRatioBoundTest, Limits) {
  EXPECT_DOUBLE_EQ(
      SpectralGapRatioLowerBound(BoundConfig(0.5, 10, 5.0), 10.0, 1.0, 0.0),
      0.5);
  EXPECT_LT(
      SpectralGapRatioLowerBound(BoundConfig(1e-6, 10, 5.0), 10.0, 1.0, 1.0),
      1e-300);
}

TEST(GapRatioBoundTest, MatchesHighPrecision) {
  Rng rng(53);
  for (int t = 0; t < 100; ++t) {
    const double eps = 0.05 + 0.95 * rng.Uniform();
    const int64_t k = 10 + static_cast<int64_t>(rng.UniformIndex(200));
    const double lambda = 10.0 + 200.0 * rng.Uniform();
    const double c = 0.5 + 2.0 * rng.Uniform();
    const double max_c = c * (0.001 + 0.01 * rng.Uniform());
    const double a = 0.05 + 0.5 * rng.Uniform();
    const double got =
        SpectralGapRatioLowerBound(BoundConfig(eps, k, lambda), c, max_c, a);
    const double expected =
        oracles::HpGapRatioBound(eps, 1e-5, k, lambda, c, max_c, a);
    EXPECT_NEAR(got, expected, 1e-10 * expected + 1e-300) << t;
  }
}

TEST(GapRatioBoundTest, DecreasesAsEpsilonShrinks) {
  double previous = std::numeric_limits<double>::infinity();
  for (double eps : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    const double b = SpectralGapRatioLowerBound(BoundConfig(eps, 150, 100.0),
                                                1.3, 0.00865, 0.4);
    EXPECT_LT(b, previous);
    previous = b;
  }
}

}  // namespace
}  // namespace dpmh::diagnostics
