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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fedaudit/bounds.hpp"
#include "fedaudit/error.hpp"

namespace fedaudit {
namespace {

template <typename F>
void expect_code(F&& f, ErrorCode code) {
  try {
    f();
    ADD_FAILURE() << "expected " << code_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

const Dataset& beta_data() {
  static const Dataset data = make_beta_dataset(1500, 2, 5, 1500, 5, 2, 17);
  return data;
}

SweepSpec small_spec() {
  SweepSpec spec;
  spec.ks = {201, 11, 51};
  spec.ds = {1, 4};
  spec.regimes = {Regime::kRandom, Regime::kPositive};
  spec.replications = 8;
  spec.tau = 0.01;
  spec.base_seed = 3;
  spec.reference_k = 801;
  return spec;
}

bool same(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

std::vector<std::string> lines_of(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(MinimalKTest, FirstReachingTargetInAscendingOrder) {
  EXPECT_EQ(minimal_k({51, 11, 201}, {0.96, 0.5, 1.0}), 51u);
  EXPECT_EQ(minimal_k({11, 51}, {0.95, 0.2}), 11u);
  EXPECT_FALSE(minimal_k({11, 51}, {0.9, 0.94}).has_value());
}

TEST(SimulateAllocationTest, KeepsBaselineMargins) {
  const auto& data = beta_data();
  const auto base = simulate_allocation(data, 5, Regime::kRandom, 0.9, 8);
  EXPECT_EQ(base, allocate_random(data.size(), 5, 8));
  const auto margins = contingency_table(base, data.group_index, 5, 2);
  for (Regime r : {Regime::kPositive, Regime::kNegative}) {
    const auto a = simulate_allocation(data, 5, r, 0.9, 8);
    EXPECT_NE(a, base);
    EXPECT_EQ(contingency_table(a, data.group_index, 5, 2), margins);
  }
}

TEST(SweepTest, IndependentOfThreadCount) {
  auto one = small_spec();
  one.threads = 1;
  auto many = small_spec();
  many.threads = 5;
  const auto a = run_sweep(beta_data(), one);
  const auto b = run_sweep(beta_data(), many);
  EXPECT_EQ(a.reference_u2, b.reference_u2);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].g_hat, b.records[i].g_hat);
    EXPECT_TRUE(same(a.records[i].abs_spearman, b.records[i].abs_spearman));
  }
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mae, b.rows[i].mae);
    EXPECT_EQ(a.rows[i].p_ok, b.rows[i].p_ok);
  }
}

TEST(SweepTest, RowsAreConsistent) {
  const auto spec = small_spec();
  const auto result = run_sweep(beta_data(), spec);
  ASSERT_EQ(result.rows.size(), 3u * 2u * 2u);
  ASSERT_EQ(result.records.size(), result.rows.size() * spec.replications);
  ASSERT_EQ(result.k95.size(), 4u);
  EXPECT_NEAR(result.reference_u2,
              u_hat(beta_data().grouped(), GridSpec(spec.reference_k), 2), 0.0);

  std::size_t r = 0;
  for (const auto& k95 : result.k95) {
    std::vector<std::size_t> ks;
    std::vector<double> p_ok;
    for (std::size_t i = 0; i < 3; ++i, ++r) {
      const auto& row = result.rows[r];
      EXPECT_EQ(row.d, k95.d);
      EXPECT_EQ(row.regime, k95.regime);
      EXPECT_EQ(row.budget, communication_budget(row.d, row.k, 2));
      EXPECT_LE(row.q05, row.q25);
      EXPECT_LE(row.q25, row.median);
      EXPECT_LE(row.median, row.q75);
      EXPECT_LE(row.q75, row.q95);
      EXPECT_EQ(std::isnan(row.mean_abs_spearman), row.d == 1);
      ks.push_back(row.k);
      p_ok.push_back(row.p_ok);
    }
    EXPECT_EQ(ks, (std::vector<std::size_t>{11, 51, 201}));
    EXPECT_EQ(k95.k95, minimal_k(ks, p_ok));
  }
}

TEST(SweepTest, TighterTauLowersPok) {
  auto loose = small_spec();
  loose.tau = 0.05;
  const auto a = run_sweep(beta_data(), loose);
  const auto b = run_sweep(beta_data(), small_spec());
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].mae, b.rows[i].mae);
    EXPECT_LE(b.rows[i].p_ok, a.rows[i].p_ok);
  }
}

TEST(SweepTest, SingleSiloMatchesCentral) {
  auto spec = small_spec();
  spec.ds = {1};
  const auto result = run_sweep(beta_data(), spec);
  for (const auto& rec : result.records) {
    EXPECT_NEAR(rec.g_hat, u_hat(beta_data().grouped(), GridSpec(rec.k), 2), 1e-12);
  }
}

TEST(SweepTest, ErrorShrinksWithK) {
  auto spec = small_spec();
  spec.ds = {4};
  spec.regimes = {Regime::kRandom};
  const auto result = run_sweep(beta_data(), spec);
  ASSERT_EQ(result.rows.size(), 3u);
  EXPECT_GT(result.rows[0].mae, result.rows[1].mae);
  EXPECT_GT(result.rows[1].mae, result.rows[2].mae);
}

TEST(SweepTest, Errors) {
  auto spec = small_spec();
  spec.ks.clear();
  expect_code([&] { run_sweep(beta_data(), spec); }, ErrorCode::kInvalidArgument);
  spec = small_spec();
  spec.replications = 0;
  expect_code([&] { run_sweep(beta_data(), spec); }, ErrorCode::kInvalidArgument);
  spec = small_spec();
  spec.tau = 0.0;
  expect_code([&] { run_sweep(beta_data(), spec); }, ErrorCode::kInvalidArgument);
  spec = small_spec();
  spec.ds = {0};
  expect_code([&] { run_sweep(beta_data(), spec); }, ErrorCode::kInvalidArgument);
}

TEST(SweepTest, WritesCsvs) {
  auto spec = small_spec();
  spec.replications = 2;
  const auto result = run_sweep(beta_data(), spec);
  const auto dir = std::filesystem::temp_directory_path() / "fedaudit_sweep_test";
  std::filesystem::remove_all(dir);
  write_sweep_csvs(result, dir.string());
  const auto mae = lines_of(dir / "mae_k.csv");
  ASSERT_EQ(mae.size(), 1 + result.rows.size());
  EXPECT_EQ(mae[0],
            "k,d,regime,reference_u2,central_u2_k,mean,q05,q25,median,q75,q95,mae,"
            "mean_rel_error,p_ok,mean_abs_spearman,budget");
  EXPECT_EQ(mae[1].substr(0, 12), "11,1,random,");
  const auto k95 = lines_of(dir / "k95.csv");
  ASSERT_EQ(k95.size(), 5u);
  EXPECT_EQ(k95[0], "d,regime,k95");
  const auto reps = lines_of(dir / "replications.csv");
  ASSERT_EQ(reps.size(), 1 + result.records.size());
  EXPECT_EQ(reps[0], "k,d,regime,replication,g_hat,rel_error,abs_spearman");
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fedaudit
