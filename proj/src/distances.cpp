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

#include "fedaudit/distances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedaudit/error.hpp"
#include "fedaudit/numeric.hpp"

namespace fedaudit {

void check_p(int p) {
  if (p != 1 && p != 2) {
    throw Error(ErrorCode::kUnsupportedP,
                "p = " + std::to_string(p) + " (only 1 and 2 are supported)");
  }
}

double wasserstein_power_grid(const QuantileArray& a, const QuantileArray& b,
                              int p) {
  check_p(p);
  if (!(a.grid() == b.grid())) {
    throw Error(ErrorCode::kGridMismatch, "quantile arrays on different grids");
  }
  NeumaierSum acc;
  for (std::size_t l = 0; l < a.size(); ++l) acc.add(abs_pow(a[l] - b[l], p));
  return a.grid().bin_width() * acc.value();
}

double wasserstein_p_grid(const QuantileArray& a, const QuantileArray& b,
                          int p) {
  const double power = wasserstein_power_grid(a, b, p);
  return p == 1 ? power : std::sqrt(power);
}

double cramer_power_step(const StepCdf& f, const StepCdf& g, int p) {
  check_p(p);
  const auto fk = f.knots();
  const auto gk = g.knots();
  std::size_t i = 0;
  std::size_t j = 0;
  double f_val = 0.0;
  double g_val = 0.0;
  double prev = 0.0;
  bool started = false;
  NeumaierSum acc;
  // Sweep the merged breakpoints; between consecutive ones both CDFs are
  // constant.
  while (i < fk.size() || j < gk.size()) {
    const double next = (j >= gk.size() || (i < fk.size() && fk[i] <= gk[j]))
                            ? fk[i]
                            : gk[j];
    if (started) acc.add((next - prev) * abs_pow(f_val - g_val, p));
    while (i < fk.size() && fk[i] == next) f_val = f.cumulative()[i++];
    while (j < gk.size() && gk[j] == next) g_val = g.cumulative()[j++];
    prev = next;
    started = true;
  }
  return acc.value();
}

double cramer_p_step(const StepCdf& f, const StepCdf& g, int p) {
  const double power = cramer_power_step(f, g, p);
  return p == 1 ? power : std::sqrt(power);
}

double weighted_median(std::span<const double> values,
                       std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "weighted median needs matching nonempty inputs");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "negative median weight");
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b] ||
           (values[a] == values[b] && weights[a] < weights[b]);
  });
  NeumaierSum total;
  for (std::size_t idx : order) total.add(weights[idx]);
  if (!(total.value() > 0.0)) {
    throw Error(ErrorCode::kDegenerateWeights, "all median weights are zero");
  }
  NeumaierSum running;
  for (std::size_t idx : order) {
    running.add(weights[idx]);
    if (weights[idx] > 0.0 &&
        running.value() / total.value() >= 0.5 - kMassSlack) {
      return values[idx];
    }
  }
  return values[order.back()];
}

QuantileArray barycenter_quantiles(std::span<const WeightedQuantiles> parts,
                                   int p) {
  check_p(p);
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "barycenter of nothing");
  }
  const GridSpec& grid = parts.front().quantiles.grid();
  NeumaierSum total;
  for (const auto& part : parts) {
    if (!(part.quantiles.grid() == grid)) {
      throw Error(ErrorCode::kGridMismatch, "barycenter inputs differ in grid");
    }
    if (!(part.weight >= 0.0)) {
      throw Error(ErrorCode::kWeightsNotNormalized, "negative weight");
    }
    total.add(part.weight);
  }
  if (std::fabs(total.value() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kWeightsNotNormalized,
                "barycenter weights sum to " + std::to_string(total.value()));
  }

  std::vector<double> out(grid.k());
  std::vector<double> column(parts.size());
  std::vector<double> weights(parts.size());
  for (std::size_t s = 0; s < parts.size(); ++s) weights[s] = parts[s].weight;
  for (std::size_t l = 0; l < grid.k(); ++l) {
    if (p == 2) {
      NeumaierSum acc;
      for (const auto& part : parts) acc.add(part.weight * part.quantiles[l]);
      out[l] = acc.value();
    } else {
      for (std::size_t s = 0; s < parts.size(); ++s) {
        column[s] = parts[s].quantiles[l];
      }
      out[l] = weighted_median(column, weights);
    }
  }
  // Compensated rounding can break monotonicity by an ulp; restore it.
  for (std::size_t l = 1; l < out.size(); ++l) out[l] = std::max(out[l], out[l - 1]);
  return QuantileArray(grid, std::move(out));
}

double frechet_variance(std::span<const WeightedQuantiles> parts,
                        const QuantileArray& center, int p) {
  NeumaierSum acc;
  for (const auto& part : parts) {
    acc.add(part.weight * wasserstein_power_grid(part.quantiles, center, p));
  }
  return acc.value();
}

}  // namespace fedaudit
