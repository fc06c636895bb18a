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

#include "fedaudit/protocol.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "fedaudit/distances.hpp"
#include "fedaudit/error.hpp"
#include "fedaudit/numeric.hpp"

namespace fedaudit {
namespace {

constexpr std::size_t kMaxFieldBytes = std::numeric_limits<std::uint16_t>::max();

}  // namespace

SiloMessage::SiloMessage(std::string silo_id, GridSpec grid,
                         std::vector<GroupEntry> entries)
    : silo_id_(std::move(silo_id)), grid_(grid), entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw Error(ErrorCode::kEmptySilo, "silo '" + silo_id_ + "' has no groups");
  }
  if (silo_id_.size() > kMaxFieldBytes || entries_.size() > kMaxFieldBytes) {
    throw Error(ErrorCode::kInvalidArgument, "silo id or group count too large");
  }
  std::set<std::string> seen;
  for (const auto& entry : entries_) {
    if (entry.label.size() > kMaxFieldBytes) {
      throw Error(ErrorCode::kInvalidArgument, "group label too long");
    }
    if (!seen.insert(entry.label).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate group label '" + entry.label + "'");
    }
    if (!(entry.sketch.grid() == grid_)) {
      throw Error(ErrorCode::kGridMismatch,
                  "group '" + entry.label + "' sketched on another grid");
    }
  }
}

const GroupEntry* SiloMessage::find(const std::string& label) const {
  for (const auto& entry : entries_) {
    if (entry.label == label) return &entry;
  }
  return nullptr;
}

SiloMessage client_summarize(
    std::string silo_id,
    const std::map<std::string, std::vector<double>>& local_scores,
    const GridSpec& grid) {
  std::vector<GroupEntry> entries;
  for (const auto& [label, scores] : local_scores) {
    if (scores.empty()) continue;
    entries.push_back({label, build_sketch(scores, grid)});
  }
  if (entries.empty()) {
    throw Error(ErrorCode::kEmptySilo, "silo '" + silo_id + "' has no scores");
  }
  return SiloMessage(std::move(silo_id), grid, std::move(entries));
}

AuditReport server_audit(std::span<const SiloMessage> messages, int p) {
  check_p(p);
  if (messages.empty()) throw Error(ErrorCode::kNoMessages, "nothing to audit");

  // Canonical silo order makes every accumulation independent of the order
  // in which messages arrived.
  std::vector<const SiloMessage*> silos;
  for (const auto& msg : messages) silos.push_back(&msg);
  std::sort(silos.begin(), silos.end(),
            [](const SiloMessage* a, const SiloMessage* b) {
              return a->silo_id() < b->silo_id();
            });
  for (std::size_t j = 1; j < silos.size(); ++j) {
    if (silos[j]->silo_id() == silos[j - 1]->silo_id()) {
      throw Error(ErrorCode::kDuplicateSilo,
                  "silo '" + silos[j]->silo_id() + "' sent twice");
    }
  }
  const GridSpec grid = silos.front()->grid();
  for (const auto* msg : silos) {
    if (!(msg->grid() == grid)) {
      throw Error(ErrorCode::kGridMismatch,
                  "silo '" + msg->silo_id() + "' uses a different grid");
    }
  }

  std::set<std::string> label_set;
  for (const auto* msg : silos) {
    for (const auto& entry : msg->entries()) label_set.insert(entry.label);
  }
  const std::vector<std::string> labels(label_set.begin(), label_set.end());
  if (labels.size() < 2) {
    throw Error(ErrorCode::kTooFewGroups,
                "federation reports fewer than two groups");
  }

  const std::size_t d = silos.size();
  const std::size_t groups = labels.size();
  AuditMetadata meta;
  meta.silo_count = d;
  meta.n_min = std::numeric_limits<std::uint64_t>::max();
  for (const auto* msg : silos) meta.silo_ids.push_back(msg->silo_id());

  // counts[s][j] = n_{j,s}
  std::vector<std::vector<std::uint64_t>> counts(groups,
                                                 std::vector<std::uint64_t>(d, 0));
  std::vector<std::uint64_t> group_totals(groups, 0);
  std::vector<std::uint64_t> silo_totals(d, 0);
  for (std::size_t s = 0; s < groups; ++s) {
    for (std::size_t j = 0; j < d; ++j) {
      const GroupEntry* entry = silos[j]->find(labels[s]);
      const std::uint64_t n = entry ? entry->sketch.count() : 0;
      counts[s][j] = n;
      group_totals[s] += n;
      silo_totals[j] += n;
      if (n == 0) {
        meta.missing_cells.emplace_back(silos[j]->silo_id(), labels[s]);
      } else {
        meta.n_min = std::min(meta.n_min, n);
        if (n == 1) meta.degenerate_cells.emplace_back(silos[j]->silo_id(), labels[s]);
      }
    }
    if (group_totals[s] == 0) {
      throw Error(ErrorCode::kUnknownGroupWeights,
                  "group '" + labels[s] + "' has zero total count");
    }
    meta.total_count += group_totals[s];
  }
  const double n_total = static_cast<double>(meta.total_count);

  AuditWeights weights;
  std::vector<double> alpha(groups);
  std::vector<std::vector<double>> pi(groups, std::vector<double>(d, 0.0));
  for (std::size_t s = 0; s < groups; ++s) {
    alpha[s] = static_cast<double>(group_totals[s]) / n_total;
    weights.alpha[labels[s]] = alpha[s];
    for (std::size_t j = 0; j < d; ++j) {
      pi[s][j] = static_cast<double>(counts[s][j]) /
                 static_cast<double>(group_totals[s]);
      weights.pi[labels[s]][silos[j]->silo_id()] = pi[s][j];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    weights.beta[silos[j]->silo_id()] = static_cast<double>(silo_totals[j]) / n_total;
  }

  // Within-group mixtures across silos and their grid quantiles.
  std::vector<WeightedCdf> group_mixtures;
  std::vector<WeightedQuantiles> mixture_curves;
  std::vector<WeightedQuantiles> within_centers;
  for (std::size_t s = 0; s < groups; ++s) {
    std::vector<WeightedCdf> silo_cdfs;
    std::vector<WeightedQuantiles> silo_curves;
    for (std::size_t j = 0; j < d; ++j) {
      if (counts[s][j] == 0) continue;
      const GroupEntry* entry = silos[j]->find(labels[s]);
      silo_cdfs.push_back({pi[s][j], sketch_to_step_cdf(entry->sketch)});
      silo_curves.push_back({pi[s][j], entry->sketch.quantiles()});
    }
    StepCdf mixture = mix_step_cdfs(silo_cdfs);
    mixture_curves.push_back(
        {alpha[s], QuantileArray(grid, invert_on_grid(mixture, grid))});
    group_mixtures.push_back({alpha[s], std::move(mixture)});
    within_centers.push_back({alpha[s], barycenter_quantiles(silo_curves, p)});
  }

  QuantileArray center = barycenter_quantiles(mixture_curves, p);
  const double g_hat = frechet_variance(mixture_curves, center, p);

  const StepCdf pooled = mix_step_cdfs(group_mixtures);
  NeumaierSum heterogeneity;
  for (const auto& part : group_mixtures) {
    heterogeneity.add(part.weight * cramer_power_step(part.cdf, pooled, p));
  }

  // Terms around the within-group centers q*_s.
  const double h = grid.bin_width();
  NeumaierSum mix_term;
  NeumaierSum remainder;
  for (std::size_t s = 0; s < groups; ++s) {
    const QuantileArray& mixed = mixture_curves[s].quantiles;
    const QuantileArray& within = within_centers[s].quantiles;
    NeumaierSum mix_acc;
    NeumaierSum cross_acc;
    for (std::size_t l = 0; l < grid.k(); ++l) {
      const double a = mixed[l] - within[l];
      mix_acc.add(abs_pow(a, p));
      if (p == 2) cross_acc.add(a * (within[l] - center[l]));
    }
    mix_term.add(alpha[s] * h * mix_acc.value());
    remainder.add(alpha[s] * 2.0 * h * cross_acc.value());
  }
  const double bar_term = frechet_variance(within_centers, center, p);

  AuditReport report{
      .p = p,
      .g_hat = g_hat,
      .h_hat = heterogeneity.value(),
      .v_mix = std::nullopt,
      .v_bar = std::nullopt,
      .r = std::nullopt,
      .v1_mix = std::nullopt,
      .v1_bar = std::nullopt,
      .weights = std::move(weights),
      .grid = grid,
      .mixture_quantiles = {},
      .barycenter_quantiles = std::move(center),
      .within_group_barycenters = {},
      .metadata = std::move(meta),
  };
  if (p == 2) {
    report.v_mix = mix_term.value();
    report.v_bar = bar_term;
    report.r = remainder.value();
  } else {
    report.v1_mix = mix_term.value();
    report.v1_bar = bar_term;
  }
  for (std::size_t s = 0; s < groups; ++s) {
    report.mixture_quantiles.emplace(labels[s], mixture_curves[s].quantiles);
    report.within_group_barycenters.emplace(labels[s], within_centers[s].quantiles);
  }
  return report;
}

}  // namespace fedaudit
