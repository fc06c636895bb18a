// Copyright 2026 The fedaudit Authors
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

// Finite-sample guarantee calculators.

#ifndef FEDAUDIT_BOUNDS_HPP_
#define FEDAUDIT_BOUNDS_HPP_

#include <cstdint>

namespace fedaudit {

struct BoundInputs {
  std::uint64_t n_min;
  std::uint64_t k;
  std::uint64_t d;
  std::uint64_t groups;
  double delta;
  double m_eps;  // density lower bound on the trimmed region
  double eps;    // trimming level, in (0, 1/2)
};

// sqrt(log(2/delta) / (2n)): DKW-Massart radius at confidence 1 - delta.
// Errors: kDeltaOutOfRange, kInvalidArgument (n = 0).
double dkw_bound(std::uint64_t n, double delta);

// (1/m_eps) sqrt(log(2(k+1) d |S| / delta) / (2 n_min)): uniform error of
// all communicated trimmed-grid quantiles at confidence 1 - delta.
double hp_quantile_bound(const BoundInputs& in);

struct WeightBounds {
  double alpha;  // sqrt(log(2|S|/delta) / (2n))
  double pi;     // sqrt(log(2d|S|/delta) / (2 n_s_min))
};

WeightBounds weight_bounds(std::uint64_t n, std::uint64_t n_s_min,
                           std::uint64_t d, std::uint64_t groups, double delta);

// groups * (k + 1) scalars per silo, times d silos.
std::uint64_t communication_budget(std::uint64_t d, std::uint64_t k,
                                   std::uint64_t groups = 2);

// c_eps * (1/k + sqrt(log((k+1) d |S| / delta) / n_min)). The constant c_eps
// is not known; the value is a scale indication only and is labelled
// "non-rigorous scale" wherever it is printed.
double g_hat_error_scale(const BoundInputs& in, double c_eps = 1.0);

}  // namespace fedaudit

#endif  // FEDAUDIT_BOUNDS_HPP_
