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

// One-dimensional Wasserstein and Cramer distances, and the pointwise
// (transport) barycenter of quantile curves.

#ifndef FEDAUDIT_DISTANCES_HPP_
#define FEDAUDIT_DISTANCES_HPP_

#include <span>
#include <vector>

#include "fedaudit/sketch.hpp"

namespace fedaudit {

struct WeightedQuantiles {
  double weight;
  QuantileArray quantiles;
};

// bin_width * sum_l |a_l - b_l|^p, i.e. W_p^p of the two step quantile
// curves. Errors: kGridMismatch, kUnsupportedP.
double wasserstein_power_grid(const QuantileArray& a, const QuantileArray& b,
                              int p);

// (wasserstein_power_grid)^(1/p).
double wasserstein_p_grid(const QuantileArray& a, const QuantileArray& b,
                          int p);

// Exact integral of |F - G|^p over the union of breakpoints.
double cramer_power_step(const StepCdf& f, const StepCdf& g, int p);

// C_p, the p-th root of cramer_power_step.
double cramer_p_step(const StepCdf& f, const StepCdf& g, int p);

// Lower weighted median: after sorting by value, the first value whose
// normalized cumulative weight reaches 1/2. Errors: kDegenerateWeights,
// kInvalidArgument (negative weight or size mismatch).
double weighted_median(std::span<const double> values,
                       std::span<const double> weights);

// Pointwise minimizer of sum_s w_s |q_{s,l} - z|^p: weighted mean for p = 2,
// lower weighted median for p = 1.
QuantileArray barycenter_quantiles(std::span<const WeightedQuantiles> parts,
                                   int p);

// sum_s w_s * W_p^p(parts_s, center): the Frechet variance of the parts
// around a given center curve. Per-part sums run in level order.
double frechet_variance(std::span<const WeightedQuantiles> parts,
                        const QuantileArray& center, int p);

// Validates p in {1, 2}; throws kUnsupportedP otherwise.
void check_p(int p);

}  // namespace fedaudit

#endif  // FEDAUDIT_DISTANCES_HPP_
