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

#include "fedaudit/audit_central.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fedaudit/distances.hpp"
#include "fedaudit/error.hpp"
#include "fedaudit/numeric.hpp"

namespace fedaudit {
namespace {

std::vector<WeightedQuantiles> group_sketches(const GroupedSample& groups,
                                              const GridSpec& grid) {
  std::vector<WeightedQuantiles> parts;
  parts.reserve(groups.group_count());
  for (std::size_t s = 0; s < groups.group_count(); ++s) {
    parts.push_back({groups.alpha()[s],
                     build_sketch_sorted(groups.sorted(s), grid).quantiles()});
  }
  return parts;
}

void require_two_groups(const GroupedSample& groups) {
  if (groups.group_count() != 2) {
    throw Error(ErrorCode::kTwoGroupsOnly,
                "operation defined for exactly two groups");
  }
}

}  // namespace

GroupedSample::GroupedSample(std::map<std::string, std::vector<double>> groups)
    : groups_(std::move(groups)) {
  if (groups_.size() < 2) {
    throw Error(ErrorCode::kTooFewGroups, "need at least two groups");
  }
  for (const auto& [label, scores] : groups_) {
    if (scores.empty()) {
      throw Error(ErrorCode::kEmptySample, "group '" + label + "' is empty");
    }
    for (double x : scores) {
      if (!std::isfinite(x)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "non-finite score in group '" + label + "'");
      }
    }
    total_ += scores.size();
    auto sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    sorted_.push_back(std::move(sorted));
  }
  for (const auto& [label, scores] : groups_) {
    alpha_.push_back(static_cast<double>(scores.size()) /
                     static_cast<double>(total_));
  }
}

std::vector<std::string> GroupedSample::labels() const {
  std::vector<std::string> out;
  for (const auto& entry : groups_) out.push_back(entry.first);
  return out;
}

double u_hat(const GroupedSample& groups, const GridSpec& grid, int p) {
  check_p(p);
  const auto parts = group_sketches(groups, grid);
  const QuantileArray center = barycenter_quantiles(parts, p);
  return frechet_variance(parts, center, p);
}

double h_hat(const GroupedSample& groups, const GridSpec& grid, int p) {
  check_p(p);
  std::vector<WeightedCdf> cdfs;
  for (std::size_t s = 0; s < groups.group_count(); ++s) {
    cdfs.push_back({groups.alpha()[s],
                    sketch_to_step_cdf(build_sketch_sorted(groups.sorted(s), grid))});
  }
  const StepCdf pooled = mix_step_cdfs(cdfs);
  NeumaierSum acc;
  for (const auto& part : cdfs) {
    acc.add(part.weight * cramer_power_step(part.cdf, pooled, p));
  }
  return acc.value();
}

double u2_linear_exact(const GroupedSample& groups, const GridSpec& grid) {
  const std::size_t k = grid.k();
  if (k < 2) throw Error(ErrorCode::kKTooSmall, "linear reconstruction needs k >= 2");
  const auto parts = group_sketches(groups, grid);
  const QuantileArray center = barycenter_quantiles(parts, 2);
  const double h = grid.bin_width();

  NeumaierSum total;
  std::vector<double> d(k);
  for (const auto& part : parts) {
    for (std::size_t l = 0; l < k; ++l) d[l] = part.quantiles[l] - center[l];
    NeumaierSum acc;
    acc.add(0.5 * h * d[0] * d[0]);
    for (std::size_t l = 0; l + 1 < k; ++l) {
      acc.add(h / 3.0 * (d[l] * d[l] + d[l] * d[l + 1] + d[l + 1] * d[l + 1]));
    }
    acc.add(0.5 * h * d[k - 1] * d[k - 1]);
    total.add(part.weight * acc.value());
  }
  return total.value();
}

double u2_bin_averaged(const GroupedSample& groups, std::size_t k) {
  require_two_groups(groups);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  const auto& x0 = groups.sorted(0);
  const auto& x1 = groups.sorted(1);
  const double n0 = static_cast<double>(x0.size());
  const double n1 = static_cast<double>(x1.size());
  const double kd = static_cast<double>(k);

  // Q_s equals the i-th order statistic on ((i-1)/n_s, i/n_s]. Sweep the
  // merged breakpoints of Q_0, Q_1 and the bin edges.
  std::vector<NeumaierSum> bins(k);
  std::size_t i = 1;
  std::size_t j = 1;
  std::size_t l = 1;
  double t = 0.0;
  while (i <= x0.size() && j <= x1.size() && l <= k) {
    const double b0 = static_cast<double>(i) / n0;
    const double b1 = static_cast<double>(j) / n1;
    const double bl = static_cast<double>(l) / kd;
    const double next = std::min({b0, b1, bl});
    bins[l - 1].add((next - t) * (x1[j - 1] - x0[i - 1]));
    if (b0 == next) ++i;
    if (b1 == next) ++j;
    if (bl == next) ++l;
    t = next;
  }
  NeumaierSum acc;
  for (const auto& bin : bins) {
    const double mean = kd * bin.value();
    acc.add(mean * mean);
  }
  return groups.alpha()[0] * groups.alpha()[1] * acc.value() / kd;
}

TwoGroupSummary two_group_summary(const GroupedSample& groups,
                                  const GridSpec& grid, int p) {
  require_two_groups(groups);
  check_p(p);
  const QuantileSketch s0 = build_sketch_sorted(groups.sorted(0), grid);
  const QuantileSketch s1 = build_sketch_sorted(groups.sorted(1), grid);
  TwoGroupSummary out{};
  out.wasserstein = wasserstein_p_grid(s0.quantiles(), s1.quantiles(), p);
  out.cramer =
      cramer_p_step(sketch_to_step_cdf(s0), sketch_to_step_cdf(s1), p);
  const auto mean = [](const std::vector<double>& xs) {
    return compensated_sum(xs) / static_cast<double>(xs.size());
  };
  out.mean_gap = std::fabs(mean(groups.sorted(1)) - mean(groups.sorted(0)));
  return out;
}

}  // namespace fedaudit
