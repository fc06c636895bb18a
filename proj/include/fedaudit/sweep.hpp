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

// Monte Carlo accuracy sweeps of the federated estimator against the
// fine-grid centralized reference.
//
// Each replication draws a baseline allocation for a (d, regime) cell,
// optionally reassigns through the copula, and audits the same allocation at
// every k of the sweep. Replications run on a thread pool; every replication
// seeds itself from (base seed, d, regime, replication index), and results
// are merged in key order, so outputs do not depend on the thread count.

#ifndef FEDAUDIT_SWEEP_HPP_
#define FEDAUDIT_SWEEP_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedaudit/dataset.hpp"
#include "fedaudit/scenario.hpp"

namespace fedaudit {

struct SweepSpec {
  std::vector<std::size_t> ks;
  std::vector<std::uint32_t> ds;
  std::vector<Regime> regimes;
  double rho = 0.9;
  std::size_t replications = 50;
  double tau = 0.01;
  std::uint64_t base_seed = 0;
  std::size_t reference_k = 2001;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// One (k, d, regime) cell.
struct SweepRow {
  std::size_t k;
  std::uint32_t d;
  Regime regime;
  double mae;
  double mean;
  double q05, q25, median, q75, q95;
  double p_ok;
  double mean_rel_error;
  double mean_abs_spearman;  // NaN when d = 1
  std::uint64_t budget;
  double central_u2_k;  // pooled u_hat on the k-point grid
};

struct K95Row {
  std::uint32_t d;
  Regime regime;
  std::optional<std::size_t> k95;
};

struct ReplicationRecord {
  std::size_t k;
  std::uint32_t d;
  Regime regime;
  std::size_t replication;
  double g_hat;
  double rel_error;
  double abs_spearman;
};

struct SweepResult {
  double reference_u2;
  std::vector<SweepRow> rows;
  std::vector<K95Row> k95;
  std::vector<ReplicationRecord> records;
};

// Baseline i.i.d. uniform allocation of the dataset rows to d silos; for the
// selection-biased regimes the rows are then reassigned through the copula
// with the baseline contingency table as margins.
Assignment simulate_allocation(const Dataset& data, std::uint32_t d, Regime regime,
                               double rho, std::uint64_t seed);

// Errors: kInvalidArgument (empty lists, zero replications, tau outside
// (0, 1)); propagates audit and allocation errors.
SweepResult run_sweep(const Dataset& data, const SweepSpec& spec);

// Smallest k (in ascending order) whose p_ok reaches `target`.
std::optional<std::size_t> minimal_k(const std::vector<std::size_t>& ks,
                                     const std::vector<double>& p_ok,
                                     double target = 0.95);

// Writes mae_k.csv, k95.csv and replications.csv into `dir`.
void write_sweep_csvs(const SweepResult& result, const std::string& dir);

}  // namespace fedaudit

#endif  // FEDAUDIT_SWEEP_HPP_
