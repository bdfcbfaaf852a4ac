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

#ifndef DPMH_RANDOM_H_
#define DPMH_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dpmh {

// SplitMix64 finalizer. Used to derive independent seeds from a master seed.
uint64_t MixSeed(uint64_t x);

// Combines a running hash with one more 64-bit word.
uint64_t HashCombine(uint64_t seed, uint64_t value);

// Seeded pseudo-random source. All variates are generated by code in this
// file from raw 64-bit engine output, so a seed reproduces the same stream on
// every standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(MixSeed(seed)) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1).
  double Uniform();

  // Standard normal via the Marsaglia polar method.
  double Normal();

  // Poisson(mean). Inversion below a mean of 30, PTRS transformed rejection
  // above. Requires mean >= 0.
  int64_t Poisson(double mean);

  // Uniform integer in [0, n).
  uint64_t UniformIndex(uint64_t n);

 private:
  std::mt19937_64 engine_;
};

// Walker/Vose alias table over a fixed set of nonnegative weights.
class AliasSampler {
 public:
  AliasSampler() = default;
  explicit AliasSampler(std::span<const double> weights);

  std::size_t Sample(Rng& rng) const;
  std::size_t size() const { return probability_.size(); }

 private:
  std::vector<double> probability_;
  std::vector<std::size_t> alias_;
};

}  // namespace dpmh

#endif  // DPMH_RANDOM_H_
