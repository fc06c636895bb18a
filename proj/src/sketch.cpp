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

#include "fedaudit/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "fedaudit/error.hpp"
#include "fedaudit/numeric.hpp"

namespace fedaudit {
namespace {

void check_level(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::kLevelOutOfRange,
                "level " + std::to_string(u) + " not in (0,1)");
  }
}

std::vector<double> prefix_masses(std::span<const double> masses) {
  std::vector<double> out(masses.size());
  NeumaierSum acc;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    acc.add(masses[i]);
    out[i] = acc.value();
  }
  return out;
}

}  // namespace

GridSpec::GridSpec(std::size_t k, double trim_epsilon)
    : k_(k), trim_epsilon_(trim_epsilon) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "grid k must be >= 1");
  if (!(trim_epsilon >= 0.0 && trim_epsilon < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "trim epsilon not in [0, 0.5)");
  }
}

double GridSpec::level(std::size_t index) const {
  const double mid = (2.0 * static_cast<double>(index) + 1.0) /
                     (2.0 * static_cast<double>(k_));
  if (trim_epsilon_ == 0.0) return mid;
  return trim_epsilon_ + mid * (1.0 - 2.0 * trim_epsilon_);
}

std::vector<double> GridSpec::levels() const {
  std::vector<double> out(k_);
  for (std::size_t i = 0; i < k_; ++i) out[i] = level(i);
  return out;
}

double GridSpec::atom_level(std::size_t index) const {
  return (2.0 * static_cast<double>(index) + 1.0) /
         (2.0 * static_cast<double>(k_));
}

double GridSpec::bin_width() const {
  return (1.0 - 2.0 * trim_epsilon_) / static_cast<double>(k_);
}

QuantileArray::QuantileArray(GridSpec grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.k()) {
    throw Error(ErrorCode::kInvalidSketch,
                "expected " + std::to_string(grid_.k()) + " values, got " +
                    std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kInvalidSketch, "non-finite quantile value");
    }
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw Error(ErrorCode::kInvalidSketch,
                  "quantile values not nondecreasing at index " +
                      std::to_string(i));
    }
  }
}

QuantileSketch::QuantileSketch(GridSpec grid, std::vector<double> values,
                               std::uint64_t count)
    : quantiles_(grid, std::move(values)), count_(count) {}

StepCdf::StepCdf(std::vector<double> knots, std::vector<double> masses)
    : knots_(std::move(knots)), masses_(std::move(masses)) {
  if (knots_.empty() || knots_.size() != masses_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "step cdf needs matching nonempty knots and masses");
  }
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || (i > 0 && !(knots_[i] > knots_[i - 1]))) {
      throw Error(ErrorCode::kInvalidArgument,
                  "step cdf knots must be finite and strictly increasing");
    }
    if (!(masses_[i] > 0.0) || !std::isfinite(masses_[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "step cdf masses must be positive");
    }
  }
  cumulative_ = prefix_masses(masses_);
  if (std::fabs(cumulative_.back() - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "step cdf masses do not sum to 1");
  }
}

double StepCdf::operator()(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  if (it == knots_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double empirical_quantile(std::span<const double> sorted_samples, double u) {
  if (sorted_samples.empty()) {
    throw Error(ErrorCode::kEmptySample, "no samples");
  }
  check_level(u);
  const std::size_t n = sorted_samples.size();
  const double nd = static_cast<double>(n);
  // Smallest i with i/n >= u; ceil(u n) can be off by one after rounding.
  auto i = static_cast<std::size_t>(
      std::clamp(std::ceil(u * nd), 1.0, nd));
  while (i > 1 && static_cast<double>(i - 1) / nd >= u - kMassSlack) --i;
  while (i < n && static_cast<double>(i) / nd < u - kMassSlack) ++i;
  return sorted_samples[i - 1];
}

QuantileSketch build_sketch_sorted(std::span<const double> sorted_samples,
                                   const GridSpec& grid) {
  if (sorted_samples.empty()) {
    throw Error(ErrorCode::kEmptySample, "cannot sketch an empty sample");
  }
  std::vector<double> values(grid.k());
  for (std::size_t l = 0; l < grid.k(); ++l) {
    values[l] = empirical_quantile(sorted_samples, grid.level(l));
  }
  return QuantileSketch(grid, std::move(values), sorted_samples.size());
}

QuantileSketch build_sketch(std::span<const double> samples,
                            const GridSpec& grid) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptySample, "cannot sketch an empty sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite score");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  return build_sketch_sorted(sorted, grid);
}

StepCdf step_cdf_from_atoms(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptySample, "no atoms");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> knots;
  std::vector<double> masses;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    knots.push_back(sorted[i]);
    masses.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  return StepCdf(std::move(knots), std::move(masses));
}

StepCdf sketch_to_step_cdf(const QuantileSketch& sketch) {
  return step_cdf_from_atoms(sketch.values());
}

StepCdf mix_step_cdfs(std::span<const WeightedCdf> parts) {
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "mixture needs at least one part");
  }
  std::vector<double> weights;
  weights.reserve(parts.size());
  for (const auto& part : parts) {
    if (!(part.weight >= 0.0) || !std::isfinite(part.weight)) {
      throw Error(ErrorCode::kWeightsNotNormalized, "negative mixture weight");
    }
    weights.push_back(part.weight);
  }
  // Sorting before summing makes the total independent of the part order.
  std::sort(weights.begin(), weights.end());
  const double total = compensated_sum(weights);
  if (std::fabs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kWeightsNotNormalized,
                "mixture weights sum to " + std::to_string(total));
  }

  std::vector<std::pair<double, double>> atoms;  // (knot, weighted mass)
  for (const auto& part : parts) {
    if (part.weight == 0.0) continue;
    const auto knots = part.cdf.knots();
    const auto masses = part.cdf.masses();
    for (std::size_t i = 0; i < knots.size(); ++i) {
      atoms.emplace_back(knots[i], part.weight / total * masses[i]);
    }
  }
  std::sort(atoms.begin(), atoms.end());

  std::vector<double> knots;
  std::vector<double> masses;
  std::size_t i = 0;
  while (i < atoms.size()) {
    NeumaierSum mass;
    std::size_t j = i;
    for (; j < atoms.size() && atoms[j].first == atoms[i].first; ++j) {
      mass.add(atoms[j].second);
    }
    if (mass.value() > 0.0) {
      knots.push_back(atoms[i].first);
      masses.push_back(mass.value());
    }
    i = j;
  }
  return StepCdf(std::move(knots), std::move(masses));
}

double invert_step_cdf(const StepCdf& cdf, double u) {
  check_level(u);
  const auto cumulative = cdf.cumulative();
  const double target = u - kMassSlack;
  const auto it =
      std::lower_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) return cdf.knots().back();
  return cdf.knots()[static_cast<std::size_t>(it - cumulative.begin())];
}

std::vector<double> invert_on_grid(const StepCdf& cdf, const GridSpec& grid) {
  std::vector<double> out(grid.k());
  for (std::size_t l = 0; l < grid.k(); ++l) {
    out[l] = invert_step_cdf(cdf, grid.atom_level(l));
  }
  return out;
}

std::vector<double> mixture_quantiles_on_grid(
    std::span<const WeightedSketch> parts, const GridSpec& grid) {
  std::vector<WeightedCdf> cdfs;
  cdfs.reserve(parts.size());
  for (const auto& part : parts) {
    if (!(part.sketch.grid() == grid)) {
      throw Error(ErrorCode::kGridMismatch, "sketch grid differs from target");
    }
    cdfs.push_back({part.weight, sketch_to_step_cdf(part.sketch)});
  }
  return invert_on_grid(mix_step_cdfs(cdfs), grid);
}

}  // namespace fedaudit
