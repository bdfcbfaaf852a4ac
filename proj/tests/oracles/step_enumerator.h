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

// Brute-force expected acceptance probability of one private minibatch MH
// step at a fixed (theta, theta') pair. Sums over the Poisson batch size, over
// every multinomial outcome of the kept multiset, and integrates the Gaussian
// noise by composite Simpson quadrature. Written from the algorithm statement
// in long double, independently of the library's step code.

#ifndef DPMH_TESTS_ORACLES_STEP_ENUMERATOR_H_
#define DPMH_TESTS_ORACLES_STEP_ENUMERATOR_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

namespace dpmh::oracles {

struct StepInstance {
  // U_i(theta) - U_i(theta') for every datum (tempered).
  std::vector<long double> energy_diff;
  // c_i (tempered).
  std::vector<long double> bounds;
  // Number of identical data sharing entry i's (energy_diff, bound); empty
  // means one each. Grouping is exact because draws are i.i.d.
  std::vector<long double> multiplicity;
  long double distance = 0;  // M(theta, theta')
  long double lambda = 1;
  int64_t batch_cap = 0;  // K
  long double epsilon = 0.5;
  long double delta = 1e-5;
  // Poisson mass ignored in the tail when the cap does not bound B.
  long double truncation = 1e-10L;
};

// E_z[min(1, exp(shift + sd z - sd^2 / 2))], z ~ N(0, 1), by Simpson's rule
// on [-14, 14] split at the kink.
inline long double NoisyAcceptance(long double shift, long double sd) {
  if (sd == 0) return std::min(1.0L, std::exp(shift));
  const auto f = [&](long double z) {
    const long double x = shift + sd * z - sd * sd / 2;
    const long double accept = x >= 0 ? 1.0L : std::exp(x);
    return accept * std::exp(-z * z / 2) / std::sqrt(2 * M_PIl);
  };
  const auto simpson = [&](long double a, long double b) {
    if (b <= a) return 0.0L;
    const int n = 20000;
    const long double h = (b - a) / n;
    long double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4 : 2);
    return sum * h / 3;
  };
  const long double lo = -14, hi = 14;
  const long double kink = std::clamp((sd * sd / 2 - shift) / sd, lo, hi);
  return simpson(lo, kink) + simpson(kink, hi);
}

// Closed form of the same expectation, used to cross-check the quadrature:
//   Phi((s - v/2) / sd) + e^s Phi((-s - v/2) / sd).
inline long double NoisyAcceptanceClosedForm(long double shift,
                                             long double sd) {
  const auto phi = [](long double x) {
    return std::erfc(-x / std::sqrt(2.0L)) / 2;
  };
  const long double v = sd * sd;
  return phi((shift - v / 2) / sd) +
         std::exp(shift) * phi((-shift - v / 2) / sd);
}

struct StepExpectation {
  long double acceptance = 0;
  long double minibatch_probability = 0;
  bool minibatch_noisy = false;
  bool fullbatch_noisy = false;
};

inline StepExpectation ExpectedAcceptance(const StepInstance& s) {
  const std::size_t n = s.bounds.size();
  const auto count = [&](std::size_t i) {
    return s.multiplicity.empty() ? 1.0L : s.multiplicity[i];
  };
  long double c_total = 0, max_c = 0, total_diff = 0;
  for (std::size_t i = 0; i < n; ++i) {
    c_total += count(i) * s.bounds[i];
    max_c = std::max(max_c, s.bounds[i]);
    total_diff += count(i) * s.energy_diff[i];
  }
  const long double cm = c_total * s.distance;
  const long double k = static_cast<long double>(s.batch_cap);

  StepExpectation out;
  // Full-batch branch.
  const long double l2 = 2 * max_c * s.distance;
  const long double sigma2 =
      std::sqrt(2 * std::log(1.25L / s.delta)) / s.epsilon;
  out.fullbatch_noisy = l2 > s.epsilon;
  const long double full_accept = out.fullbatch_noisy
                                      ? NoisyAcceptance(total_diff, sigma2 * l2)
                                      : std::min(1.0L, std::exp(total_diff));

  // Minibatch branch ingredients.
  const long double l1 = 2 * std::log(1 + cm / s.lambda);
  const long double sigma1 =
      6 * k * max_c *
      std::sqrt(2 * std::log(2.5L * k * max_c / (s.delta * c_total))) /
      (s.epsilon * c_total);
  out.minibatch_noisy = l1 > s.epsilon * c_total / (6 * k * max_c);
  const long double mini_sd = out.minibatch_noisy ? sigma1 * l1 : 0;

  // Per-draw outcome probabilities: kept datum i, or dropped.
  std::vector<long double> kept(n), term(n);
  long double dropped = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const long double c = s.bounds[i];
    const long double keep =
        (s.lambda * c + c_total / 2 * (-s.energy_diff[i] + c * s.distance)) /
        (s.lambda * c + c * cm);
    kept[i] = count(i) * c / c_total * keep;
    dropped -= kept[i];
    term[i] =
        2 * std::atanh(c_total * s.energy_diff[i] / (c * (2 * s.lambda + cm)));
  }

  // Equal multisets give bit-identical log ratios; integrate each once.
  std::map<long double, long double> noisy_cache;
  const long double mean = s.lambda + cm;
  long double pois = std::exp(-mean);
  long double cdf = 0;
  for (int64_t b = 0; b < s.batch_cap; ++b) {
    if (b > 0) pois *= mean / b;
    cdf += pois;
    // Sum over counts (n_1..n_N) with sum <= b; the rest are dropped draws.
    long double expectation = 0;
    std::vector<int64_t> counts(n, 0);
    const std::function<void(std::size_t, int64_t, long double, long double)>
        recurse = [&](std::size_t i, int64_t left, long double log_coef,
                      long double log_ratio) {
          if (i == n) {
            const long double prob =
                std::exp(log_coef - std::lgamma(left + 1.0L) +
                         left * std::log(std::max(dropped, 1e-300L)));
            long double accept = std::min(1.0L, std::exp(log_ratio));
            if (out.minibatch_noisy) {
              auto [it, fresh] = noisy_cache.try_emplace(log_ratio, 0.0L);
              if (fresh) it->second = NoisyAcceptance(log_ratio, mini_sd);
              accept = it->second;
            }
            expectation += (left > 0 && dropped <= 0) ? 0 : prob * accept;
            return;
          }
          for (int64_t c = 0; c <= left; ++c) {
            if (c > 0 && kept[i] <= 0) break;
            const long double lc =
                c == 0 ? 0 : c * std::log(kept[i]) - std::lgamma(c + 1.0L);
            recurse(i + 1, left - c, log_coef + lc, log_ratio + c * term[i]);
          }
        };
    recurse(0, b, std::lgamma(b + 1.0L), 0);
    out.acceptance += pois * expectation;
    out.minibatch_probability += pois;
    if (1 - cdf < s.truncation && s.batch_cap > b + 1) {
      // Only reachable when the cap is far in the tail; treat the remainder
      // as negligible.
      return out;
    }
  }
  out.acceptance += (1 - cdf) * full_accept;
  return out;
}

}  // namespace dpmh::oracles

#endif  // DPMH_TESTS_ORACLES_STEP_ENUMERATOR_H_
