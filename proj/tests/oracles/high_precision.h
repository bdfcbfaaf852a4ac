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

// Reference evaluations at 50 significant digits. These are written from the
// closed-form definitions and share no code with the library.

#ifndef DPMH_TESTS_ORACLES_HIGH_PRECISION_H_
#define DPMH_TESTS_ORACLES_HIGH_PRECISION_H_

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>
#include <utility>

namespace dpmh::oracles {

using Hp = boost::multiprecision::cpp_bin_float_50;

inline double HpSensitivityL1(double c_total, double m, double lambda) {
  return static_cast<double>(2 * log(1 + Hp(c_total) * Hp(m) / Hp(lambda)));
}

inline double HpSigma2(double epsilon, double delta) {
  return static_cast<double>(sqrt(2 * log(Hp(1.25) / Hp(delta))) / Hp(epsilon));
}

inline double HpSigma1(double epsilon, double delta, int64_t k, double c_total,
                       double max_c) {
  const Hp kc = Hp(k) * Hp(max_c);
  return static_cast<double>(
      6 * kc * sqrt(2 * log(Hp(2.5) * kc / (Hp(delta) * Hp(c_total)))) /
      (Hp(epsilon) * Hp(c_total)));
}

// Exact amplified (epsilon, delta) for K with-replacement draws.
inline std::pair<double, double> HpAmplify(double epsilon, double delta,
                                           double p, int64_t k) {
  const Hp e(epsilon), pp(p);
  const Hp up = 1 - pp + pp * exp(e);
  const Hp down = 1 - pp + pp * exp(-e);
  const Hp eps_out = Hp(k) * log(up / down);
  const Hp delta_out = Hp(delta) / (exp(e) - 1) * (pow(up, k) - 1);
  return {static_cast<double>(eps_out), static_cast<double>(delta_out)};
}

inline std::pair<double, double> HpCompose(double eps_step, double delta_step,
                                           int64_t steps, double slack) {
  const Hp e(eps_step), t(steps);
  const Hp eps_out =
      sqrt(2 * t * log(1 / Hp(slack))) * e + t * e * (exp(e) - 1);
  const Hp delta_out = t * Hp(delta_step) + Hp(slack);
  return {static_cast<double>(eps_out), static_cast<double>(delta_out)};
}

inline double HpGapRatioBound(double epsilon, double delta, int64_t k,
                              double lambda, double c_total, double max_c,
                              double diameter) {
  const Hp kk(k), c(c_total), mc(max_c), a(diameter), lam(lambda), e(epsilon),
      d(delta);
  const Hp growth = log(1 + c * a / lam);
  const Hp arg = 216 * kk * kk * mc * mc * log(Hp(2.5) * kk * mc / (d * c)) *
                 growth * growth / (e * e * c * c);
  const Hp upper_tail = boost::math::erfc(arg / sqrt(Hp(2))) / 2;
  const Hp u = c * c * a * a / lam;
  return static_cast<double>(upper_tail * exp(-u - 2 * sqrt(u * log(Hp(2)))));
}

// exp(2 artanh(x)) = (1 + x) / (1 - x).
inline double HpExpTwoArtanh(double x) {
  return static_cast<double>((1 + Hp(x)) / (1 - Hp(x)));
}

}  // namespace dpmh::oracles

#endif  // DPMH_TESTS_ORACLES_HIGH_PRECISION_H_
