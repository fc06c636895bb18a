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

// One-shot federated audit. Each silo releases, per sensitive group, a sample
// count and a k-quantile sketch; the server rebuilds within-group mixtures
// across silos and estimates the global disparity G_p, the pooled
// heterogeneity H_p, and the decomposition diagnostics.

#ifndef FEDAUDIT_PROTOCOL_HPP_
#define FEDAUDIT_PROTOCOL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fedaudit/sketch.hpp"

namespace fedaudit {

struct GroupEntry {
  std::string label;
  QuantileSketch sketch;  // sketch.count() is n_{j,s}

  bool operator==(const GroupEntry&) const = default;
};

class SiloMessage {
 public:
  // Throws kEmptySilo without entries, kGridMismatch when an entry's sketch is
  // on another grid, kInvalidArgument for duplicate labels or identifiers
  // longer than 65535 bytes.
  SiloMessage(std::string silo_id, GridSpec grid,
              std::vector<GroupEntry> entries);

  const std::string& silo_id() const { return silo_id_; }
  const GridSpec& grid() const { return grid_; }
  const std::vector<GroupEntry>& entries() const { return entries_; }
  const GroupEntry* find(const std::string& label) const;

  bool operator==(const SiloMessage&) const = default;

 private:
  std::string silo_id_;
  GridSpec grid_;
  std::vector<GroupEntry> entries_;
};

// Silo side. Groups with no local scores are left out of the message.
// Errors: kEmptySilo when every group is empty.
SiloMessage client_summarize(
    std::string silo_id,
    const std::map<std::string, std::vector<double>>& local_scores,
    const GridSpec& grid);

struct AuditWeights {
  std::map<std::string, double> alpha;                        // n_s / n
  std::map<std::string, std::map<std::string, double>> pi;    // group -> silo
  std::map<std::string, double> beta;                         // n_j / n
};

struct AuditMetadata {
  std::size_t silo_count = 0;
  std::vector<std::string> silo_ids;  // sorted
  std::uint64_t total_count = 0;
  std::uint64_t n_min = 0;  // smallest nonzero n_{j,s}
  std::vector<std::pair<std::string, std::string>> degenerate_cells;  // n = 1
  std::vector<std::pair<std::string, std::string>> missing_cells;
};

struct AuditReport {
  int p;
  double g_hat;
  double h_hat;
  // Decomposition G_2 = V_mix + V_bar + R (p = 2 only).
  std::optional<double> v_mix;
  std::optional<double> v_bar;
  std::optional<double> r;
  // Triangle-inequality terms (p = 1 only).
  std::optional<double> v1_mix;
  std::optional<double> v1_bar;
  AuditWeights weights;
  GridSpec grid;
  std::map<std::string, QuantileArray> mixture_quantiles;
  QuantileArray barycenter_quantiles;
  // Within-group transport centers across silos.
  std::map<std::string, QuantileArray> within_group_barycenters;
  AuditMetadata metadata;
};

// Server side. The result does not depend on message order.
// Errors: kNoMessages, kGridMismatch, kDuplicateSilo, kTooFewGroups,
// kUnknownGroupWeights, kUnsupportedP.
AuditReport server_audit(std::span<const SiloMessage> messages, int p);

}  // namespace fedaudit

#endif  // FEDAUDIT_PROTOCOL_HPP_
