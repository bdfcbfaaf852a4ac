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

#include <cstdint>
#include <memory>
#include <vector>

#include "benchmark/benchmark.h"
#include "dpmh/mixture_model.h"
#include "dpmh/privacy.h"
#include "dpmh/random.h"
#include "dpmh/sampler.h"
#include "dpmh/sampler_config.h"

namespace dpmh {
namespace {

std::shared_ptr<const MixtureModel> Mixture(int64_t n) {
  auto data = GenerateMixtureData(n, 7);
  auto model = MixtureModel::Create(*data, MixtureParams{}.sigma_x2, 100.0,
                                    BoxDomain{{-1.5, -1.5}, {2.5, 2.5}});
  return *model;
}

// One chain iteration on the mixture; range(0) is the mode, range(1) is K.
void BM_Step(benchmark::State& bench) {
  auto model = Mixture(2000);
  SamplerConfig config;
  config.mode = static_cast<SamplerMode>(bench.range(0));
  config.lambda = 10.0;
  config.batch_cap = bench.range(1);
  config.epsilon = 0.1;
  config.delta = 1e-5;
  config.proposal_scale = 0.27;
  auto sampler = Sampler::Create(model, config);
  auto state = sampler->Init({0.5, 0.5}, 1);
  int64_t touches = 0;
  for (auto _ : bench) {
    auto record = sampler->Step(*state);
    touches += record->data_touches;
  }
  bench.counters["touches_per_step"] = benchmark::Counter(
      static_cast<double>(touches), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_Step)
    ->Args({static_cast<int64_t>(SamplerMode::kMh), 1})
    ->Args({static_cast<int64_t>(SamplerMode::kPenalty), 1})
    ->Args({static_cast<int64_t>(SamplerMode::kDpFast), 25})
    ->Args({static_cast<int64_t>(SamplerMode::kDpFast), 2000});

void BM_DrawBatchSize(benchmark::State& bench) {
  Rng rng(3);
  const double mean = static_cast<double>(bench.range(0));
  for (auto _ : bench) {
    benchmark::DoNotOptimize(DrawBatchSize(1.0, mean - 1.0, 1.0, rng));
  }
}
BENCHMARK(BM_DrawBatchSize)->Arg(5)->Arg(100)->Arg(5000);

void BM_Calibrate(benchmark::State& bench) {
  for (auto _ : bench) {
    benchmark::DoNotOptimize(Calibrate(0.1, 1e-5, 25, 600.0, 1.0));
  }
}
BENCHMARK(BM_Calibrate);

}  // namespace
}  // namespace dpmh

BENCHMARK_MAIN();
