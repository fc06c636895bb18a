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

// Silo allocation scenarios with controlled score/silo dependence.
//
// A baseline i.i.d. uniform allocation fixes the group-wise silo margins
// N[silo][group]. The selection-bias regimes then reassign individuals inside
// each group through a Gaussian copula on the score ranks, keeping N exactly.
// Silo labels in assignments are 1-based; contingency rows are 0-based
// (row j holds silo j + 1).

#ifndef FEDAUDIT_SCENARIO_HPP_
#define FEDAUDIT_SCENARIO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fedaudit {

enum class Regime { kRandom, kPositive, kNegative };

std::string_view regime_name(Regime regime);
// Errors: kInvalidArgument for an unknown name.
Regime parse_regime(std::string_view name);

using Assignment = std::vector<std::uint32_t>;

class ContingencyTable {
 public:
  ContingencyTable(std::size_t silos, std::size_t groups)
      : silos_(silos), groups_(groups), cells_(silos * groups, 0) {}

  std::size_t silos() const { return silos_; }
  std::size_t groups() const { return groups_; }
  std::uint64_t& at(std::size_t silo_row, std::size_t group) {
    return cells_[silo_row * groups_ + group];
  }
  std::uint64_t at(std::size_t silo_row, std::size_t group) const {
    return cells_[silo_row * groups_ + group];
  }
  std::uint64_t group_total(std::size_t group) const;
  std::uint64_t silo_total(std::size_t silo_row) const;

  bool operator==(const ContingencyTable&) const = default;

 private:
  std::size_t silos_;
  std::size_t groups_;
  std::vector<std::uint64_t> cells_;
};

struct AllocationScenario {
  Regime regime = Regime::kRandom;
  double rho = 0.0;
  std::uint32_t d = 1;
  std::uint64_t seed = 0;
  ContingencyTable margins{1, 1};
};

// I.i.d. uniform silo labels in 1..d. Errors: kInvalidArgument when d = 0.
Assignment allocate_random(std::size_t n, std::uint32_t d, std::uint64_t seed);

// Counts per (silo, group). group_index holds 0-based group ids.
ContingencyTable contingency_table(std::span<const std::uint32_t> assignment,
                                   std::span<const std::uint32_t> group_index,
                                   std::uint32_t d, std::size_t groups);

// Gaussian-copula reassignment. Scores are rank-transformed
// (R_i = rank/(n+1), ties broken by a seeded permutation), the latent
// rho * Phi^-1(R_i) + sqrt(1 - rho^2) eps_i is formed, and within each group
// individuals are cut into silos 1..d by latent order according to the
// margins. The negative regime reverses the latent for group 0; the random
// regime uses rho = 0. The realized table equals `margins` exactly.
// Errors: kMarginMismatch, kInvalidArgument (sizes, rho outside [0, 1)).
Assignment allocate_copula(std::span<const double> scores,
                           std::span<const std::uint32_t> group_index,
                           const ContingencyTable& margins, double rho,
                           Regime regime, std::uint64_t seed);

struct Dependence {
  double pearson;
  double spearman;
};

// Pearson on raw values, Spearman on average ranks.
// Errors: kDegenerateCorrelation (zero variance), kInvalidArgument (sizes).
Dependence dependence_diagnostics(std::span<const double> scores,
                                  std::span<const std::uint32_t> assignment);

// Average ranks (1-based); ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

// n i.i.d. Beta(alpha, beta) draws in (0, 1).
std::vector<double> sample_beta(double alpha, double beta, std::size_t n,
                                std::uint64_t seed);

// Standard normal CDF, 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);
// Inverse standard normal CDF (Wichura's AS 241, relative error ~1e-16).
// Errors: kLevelOutOfRange unless u is in (0, 1).
double normal_quantile(double u);

}  // namespace fedaudit

#endif  // FEDAUDIT_SCENARIO_HPP_
