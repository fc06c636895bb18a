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

#include "fedaudit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "fedaudit/bounds.hpp"
#include "fedaudit/error.hpp"
#include "fedaudit/numeric.hpp"
#include "fedaudit/protocol.hpp"
#include "fedaudit/random.hpp"

namespace fedaudit {
namespace {

struct Cell {
  std::uint32_t d;
  Regime regime;
  std::size_t replication;
};

struct CellResult {
  std::vector<double> g_hat;  // one per k
  double abs_spearman;
};

// Sample quantile with linear interpolation between order statistics.
double interpolated_quantile(std::vector<double> xs, double u) {
  std::sort(xs.begin(), xs.end());
  const double pos = u * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

double mean_of(const std::vector<double>& xs) {
  return compensated_sum(xs) / static_cast<double>(xs.size());
}

CellResult run_cell(const Dataset& data, const SweepSpec& spec, const Cell& cell) {
  const std::uint64_t seed =
      derive_seed(spec.base_seed, "replication",
                  (static_cast<std::uint64_t>(cell.d) << 40) ^
                      (static_cast<std::uint64_t>(cell.regime) << 32) ^
                      cell.replication);
  const Assignment assignment =
      simulate_allocation(data, cell.d, cell.regime, spec.rho, seed);

  CellResult out;
  out.abs_spearman = std::numeric_limits<double>::quiet_NaN();
  if (cell.d > 1) {
    try {
      out.abs_spearman =
          std::fabs(dependence_diagnostics(data.scores, assignment).spearman);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateCorrelation) throw;
    }
  }

  std::vector<std::map<std::string, std::vector<double>>> silo_scores(cell.d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    silo_scores[assignment[i] - 1][data.labels[data.group_index[i]]].push_back(
        data.scores[i]);
  }
  for (std::size_t k : spec.ks) {
    const GridSpec grid(k);
    std::vector<SiloMessage> messages;
    for (std::uint32_t j = 0; j < cell.d; ++j) {
      if (silo_scores[j].empty()) continue;
      messages.push_back(
          client_summarize("silo-" + std::to_string(j + 1), silo_scores[j], grid));
    }
    out.g_hat.push_back(server_audit(messages, 2).g_hat);
  }
  return out;
}

}  // namespace

Assignment simulate_allocation(const Dataset& data, std::uint32_t d, Regime regime,
                               double rho, std::uint64_t seed) {
  Assignment baseline = allocate_random(data.size(), d, seed);
  if (regime == Regime::kRandom) return baseline;
  const ContingencyTable margins =
      contingency_table(baseline, data.group_index, d, data.labels.size());
  return allocate_copula(data.scores, data.group_index, margins, rho, regime,
                         derive_seed(seed, "copula"));
}

std::optional<std::size_t> minimal_k(const std::vector<std::size_t>& ks,
                                     const std::vector<double>& p_ok,
                                     double target) {
  std::vector<std::size_t> order(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return ks[a] < ks[b]; });
  for (std::size_t i : order) {
    if (p_ok[i] >= target) return ks[i];
  }
  return std::nullopt;
}

SweepResult run_sweep(const Dataset& data, const SweepSpec& spec) {
  if (spec.ks.empty() || spec.ds.empty() || spec.regimes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs k, d and regime lists");
  }
  if (spec.replications == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs at least one replication");
  }
  if (!(spec.tau > 0.0 && spec.tau < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "tau must be in (0, 1)");
  }
  for (auto d : spec.ds) {
    if (d == 0) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  }

  SweepSpec sorted_spec = spec;
  std::sort(sorted_spec.ks.begin(), sorted_spec.ks.end());
  sorted_spec.ks.erase(std::unique(sorted_spec.ks.begin(), sorted_spec.ks.end()),
                       sorted_spec.ks.end());

  const GroupedSample pooled = data.grouped();
  SweepResult result;
  result.reference_u2 = u_hat(pooled, GridSpec(spec.reference_k), 2);

  std::vector<Cell> cells;
  for (auto d : sorted_spec.ds) {
    for (auto regime : sorted_spec.regimes) {
      for (std::size_t rep = 0; rep < spec.replications; ++rep) {
        cells.push_back({d, regime, rep});
      }
    }
  }
  std::vector<CellResult> outcomes(cells.size());
  std::vector<std::exception_ptr> failures(cells.size());
  std::atomic<std::size_t> next{0};
  unsigned threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
          try {
            outcomes[i] = run_cell(data, sorted_spec, cells[i]);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  const double ref = result.reference_u2;
  std::size_t cursor = 0;
  for (auto d : sorted_spec.ds) {
    for (auto regime : sorted_spec.regimes) {
      const std::size_t first = cursor;
      cursor += spec.replications;
      std::vector<double> p_ok_by_k;
      for (std::size_t ki = 0; ki < sorted_spec.ks.size(); ++ki) {
        const std::size_t k = sorted_spec.ks[ki];
        std::vector<double> g;
        std::vector<double> abs_err;
        std::vector<double> rel_err;
        std::vector<double> spearman;
        std::size_t ok = 0;
        for (std::size_t c = first; c < cursor; ++c) {
          const double value = outcomes[c].g_hat[ki];
          const double rel = std::fabs(value - ref) / ref;
          g.push_back(value);
          abs_err.push_back(std::fabs(value - ref));
          rel_err.push_back(rel);
          if (rel <= spec.tau) ++ok;
          if (!std::isnan(outcomes[c].abs_spearman)) spearman.push_back(outcomes[c].abs_spearman);
          result.records.push_back({k, d, regime, cells[c].replication, value, rel,
                                    outcomes[c].abs_spearman});
        }
        SweepRow row{};
        row.k = k;
        row.d = d;
        row.regime = regime;
        row.mae = mean_of(abs_err);
        row.mean = mean_of(g);
        row.q05 = interpolated_quantile(g, 0.05);
        row.q25 = interpolated_quantile(g, 0.25);
        row.median = interpolated_quantile(g, 0.5);
        row.q75 = interpolated_quantile(g, 0.75);
        row.q95 = interpolated_quantile(g, 0.95);
        row.p_ok = static_cast<double>(ok) / static_cast<double>(spec.replications);
        row.mean_rel_error = mean_of(rel_err);
        row.mean_abs_spearman = spearman.empty()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : mean_of(spearman);
        row.budget = communication_budget(d, k, data.labels.size());
        row.central_u2_k = u_hat(pooled, GridSpec(k), 2);
        p_ok_by_k.push_back(row.p_ok);
        result.rows.push_back(row);
      }
      result.k95.push_back({d, regime, minimal_k(sorted_spec.ks, p_ok_by_k)});
    }
  }
  return result;
}

void write_sweep_csvs(const SweepResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const std::string& name) {
    std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + name);
    return out;
  };
  {
    auto out = open("mae_k.csv");
    out << "k,d,regime,reference_u2,central_u2_k,mean,q05,q25,median,q75,q95,"
           "mae,mean_rel_error,p_ok,mean_abs_spearman,budget\n";
    for (const auto& r : result.rows) {
      out << r.k << ',' << r.d << ',' << regime_name(r.regime) << ','
          << format_double(result.reference_u2) << ',' << format_double(r.central_u2_k)
          << ',' << format_double(r.mean) << ',' << format_double(r.q05) << ','
          << format_double(r.q25) << ',' << format_double(r.median) << ','
          << format_double(r.q75) << ',' << format_double(r.q95) << ','
          << format_double(r.mae) << ',' << format_double(r.mean_rel_error) << ','
          << format_double(r.p_ok) << ',' << format_double(r.mean_abs_spearman) << ','
          << r.budget << '\n';
    }
  }
  {
    auto out = open("k95.csv");
    out << "d,regime,k95\n";
    for (const auto& r : result.k95) {
      out << r.d << ',' << regime_name(r.regime) << ',';
      if (r.k95) out << *r.k95;
      out << '\n';
    }
  }
  {
    auto out = open("replications.csv");
    out << "k,d,regime,replication,g_hat,rel_error,abs_spearman\n";
    for (const auto& r : result.records) {
      out << r.k << ',' << r.d << ',' << regime_name(r.regime) << ',' << r.replication
          << ',' << format_double(r.g_hat) << ',' << format_double(r.rel_error) << ','
          << format_double(r.abs_spearman) << '\n';
    }
  }
}

}  // namespace fedaudit
