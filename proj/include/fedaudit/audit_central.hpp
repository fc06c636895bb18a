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

// Centralized disparity functionals computed from pooled per-group scores.
//
// u_hat is the Wasserstein-Frechet variance of the group score laws around
// their transport barycenter; h_hat is the Cramer-Frechet variance around the
// pooled mixture. Both are reported in p-th power units.

#ifndef FEDAUDIT_AUDIT_CENTRAL_HPP_
#define FEDAUDIT_AUDIT_CENTRAL_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fedaudit/sketch.hpp"

namespace fedaudit {

// Raw scores keyed by group label, with weights alpha_s = n_s / n. Labels are
// kept in lexicographic order.
class GroupedSample {
 public:
  // Throws kTooFewGroups with fewer than two groups and kEmptySample when a
  // group has no scores.
  explicit GroupedSample(std::map<std::string, std::vector<double>> groups);

  const std::map<std::string, std::vector<double>>& groups() const {
    return groups_;
  }
  std::size_t group_count() const { return groups_.size(); }
  std::size_t total() const { return total_; }
  // Weights in label order.
  const std::vector<double>& alpha() const { return alpha_; }
  std::vector<std::string> labels() const;
  // Ascending copy of one group's scores, in label order.
  const std::vector<double>& sorted(std::size_t group_index) const {
    return sorted_[group_index];
  }

 private:
  std::map<std::string, std::vector<double>> groups_;
  std::vector<std::vector<double>> sorted_;
  std::vector<double> alpha_;
  std::size_t total_ = 0;
};

// Riemann-sum estimate sum_s alpha_s * h * sum_l |q_{s,l} - q*_l|^p on the
// grid, with q* the pointwise barycenter and h the grid bin width.
double u_hat(const GroupedSample& groups, const GridSpec& grid, int p);

// sum_s alpha_s C_p(F_s, F_mix)^p between the sketch-induced step CDFs and
// their alpha-mixture, integrated exactly.
double h_hat(const GroupedSample& groups, const GridSpec& grid, int p);

// Exact integral of the piecewise-linear quantile reconstruction (constant
// on the two boundary half-bins), p = 2. Errors: kKTooSmall when k < 2.
double u2_linear_exact(const GroupedSample& groups, const GridSpec& grid);

// alpha_0 alpha_1 (1/k) sum_l mean_{I_l}(Q_1 - Q_0)^2 with the bin means taken
// exactly from the empirical quantile step functions over
// I_l = [(l-1)/k, l/k). Errors: kTwoGroupsOnly.
double u2_bin_averaged(const GroupedSample& groups, std::size_t k);

// Two-group summary used by the audit report.
struct TwoGroupSummary {
  double wasserstein;  // W_p between the two group sketches (rooted)
  double cramer;       // C_p between the two sketch step CDFs (rooted)
  double mean_gap;     // |mean_1 - mean_0| of the raw scores
};

// Errors: kTwoGroupsOnly.
TwoGroupSummary two_group_summary(const GroupedSample& groups,
                                  const GridSpec& grid, int p);

}  // namespace fedaudit

#endif  // FEDAUDIT_AUDIT_CENTRAL_HPP_
