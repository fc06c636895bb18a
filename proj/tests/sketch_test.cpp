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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fedaudit/error.hpp"
#include "oracles.hpp"

namespace fedaudit {
namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

template <typename F>
void expect_code(F&& f, ErrorCode code) {
  try {
    f();
    ADD_FAILURE() << "expected " << code_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

TEST(GridSpecTest, MidpointLevels) {
  const GridSpec grid(4);
  EXPECT_EQ(grid.levels(), (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
  EXPECT_DOUBLE_EQ(grid.bin_width(), 0.25);
}

TEST(GridSpecTest, TrimmedLevels) {
  const GridSpec grid(2, 0.1);
  EXPECT_DOUBLE_EQ(grid.level(0), 0.1 + 0.5 * 0.8 / 2);
  EXPECT_DOUBLE_EQ(grid.level(1), 0.1 + 1.5 * 0.8 / 2);
  EXPECT_DOUBLE_EQ(grid.bin_width(), 0.4);
  const auto levels = GridSpec(37, 0.2).levels();
  EXPECT_TRUE(std::is_sorted(levels.begin(), levels.end()));
  EXPECT_GT(levels.front(), 0.0);
  EXPECT_LT(levels.back(), 1.0);
}

TEST(GridSpecTest, RejectsBadArguments) {
  expect_code([] { GridSpec(0); }, ErrorCode::kInvalidArgument);
  expect_code([] { GridSpec(3, 0.5); }, ErrorCode::kInvalidArgument);
  expect_code([] { GridSpec(3, -0.1); }, ErrorCode::kInvalidArgument);
}

TEST(EmpiricalQuantileTest, Examples) {
  const std::vector<double> one{5};
  EXPECT_EQ(empirical_quantile(one, 0.5), 5);
  const std::vector<double> four{1, 2, 3, 4};
  EXPECT_EQ(empirical_quantile(four, 0.5), 2);
  EXPECT_EQ(empirical_quantile(four, 0.51), 3);
}

TEST(EmpiricalQuantileTest, Errors) {
  const std::vector<double> none;
  const std::vector<double> four{1, 2, 3, 4};
  expect_code([&] { empirical_quantile(none, 0.5); }, ErrorCode::kEmptySample);
  expect_code([&] { empirical_quantile(four, 0.0); }, ErrorCode::kLevelOutOfRange);
  expect_code([&] { empirical_quantile(four, 1.0); }, ErrorCode::kLevelOutOfRange);
}

TEST(EmpiricalQuantileTest, MatchesCdfScanOracle) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 40;
    const std::size_t k = 1 + gen() % 30;
    auto xs = trial % 2 ? oracle::random_sample(gen, n) : oracle::lumpy_sample(gen, n);
    const auto sk = build_sketch(xs, GridSpec(k));
    EXPECT_EQ(to_vec(sk.values()), oracle::midpoint_sketch(xs, k)) << n << " " << k;
    EXPECT_EQ(sk.count(), n);
  }
}

TEST(BuildSketchTest, Examples) {
  const std::vector<double> zeros(9, 0.0);
  auto sk = build_sketch(zeros, GridSpec(4));
  EXPECT_EQ(to_vec(sk.values()), (std::vector<double>{0, 0, 0, 0}));
  EXPECT_EQ(sk.count(), 9u);

  const std::vector<double> four{4, 2, 1, 3};
  sk = build_sketch(four, GridSpec(2));
  EXPECT_EQ(to_vec(sk.values()), (std::vector<double>{1, 3}));
  EXPECT_EQ(sk.count(), 4u);
  sk = build_sketch(four, GridSpec(4));
  EXPECT_EQ(to_vec(sk.values()), (std::vector<double>{1, 2, 3, 4}));
}

TEST(BuildSketchTest, EmptySample) {
  const std::vector<double> none;
  expect_code([&] { build_sketch(none, GridSpec(3)); }, ErrorCode::kEmptySample);
}

TEST(QuantileSketchTest, RejectsInvalidValues) {
  expect_code([] { QuantileSketch(GridSpec(2), {2, 1}, 3); }, ErrorCode::kInvalidSketch);
  expect_code([] { QuantileSketch(GridSpec(3), {1, 2}, 3); }, ErrorCode::kInvalidSketch);
  expect_code([] { QuantileSketch(GridSpec(2), {1, NAN}, 3); }, ErrorCode::kInvalidSketch);
}

TEST(StepCdfTest, FromSketch) {
  auto cdf = sketch_to_step_cdf(QuantileSketch(GridSpec(2), {1, 3}, 2));
  EXPECT_EQ(to_vec(cdf.knots()), (std::vector<double>{1, 3}));
  EXPECT_EQ(to_vec(cdf.masses()), (std::vector<double>{0.5, 0.5}));

  cdf = sketch_to_step_cdf(QuantileSketch(GridSpec(4), {2, 2, 5, 5}, 4));
  EXPECT_EQ(to_vec(cdf.knots()), (std::vector<double>{2, 5}));
  EXPECT_EQ(to_vec(cdf.masses()), (std::vector<double>{0.5, 0.5}));

  cdf = sketch_to_step_cdf(QuantileSketch(GridSpec(3), {0, 0, 0}, 1));
  EXPECT_EQ(to_vec(cdf.knots()), (std::vector<double>{0}));
  EXPECT_EQ(to_vec(cdf.masses()), (std::vector<double>{1.0}));
}

TEST(StepCdfTest, Evaluation) {
  const StepCdf cdf({1, 2, 3}, {0.25, 0.5, 0.25});
  EXPECT_EQ(cdf(0.5), 0.0);
  EXPECT_EQ(cdf(1.0), 0.25);
  EXPECT_EQ(cdf(2.5), 0.75);
  EXPECT_EQ(cdf(3.0), 1.0);
  EXPECT_EQ(cdf(100), 1.0);
}

TEST(StepCdfTest, RejectsInvalid) {
  expect_code([] { StepCdf({1, 1}, {0.5, 0.5}); }, ErrorCode::kInvalidArgument);
  expect_code([] { StepCdf({1, 2}, {0.5, 0.4}); }, ErrorCode::kInvalidArgument);
  expect_code([] { StepCdf({1, 2}, {1.0, 0.0}); }, ErrorCode::kInvalidArgument);
  expect_code([] { StepCdf({}, {}); }, ErrorCode::kInvalidArgument);
}

TEST(MixStepCdfsTest, Examples) {
  const StepCdf a({1, 3}, {0.5, 0.5});
  const StepCdf b({2, 4}, {0.5, 0.5});
  std::vector<WeightedCdf> parts{{1.0, a}};
  EXPECT_EQ(mix_step_cdfs(parts), a);

  parts = {{0.5, a}, {0.5, b}};
  const auto mix = mix_step_cdfs(parts);
  EXPECT_EQ(to_vec(mix.knots()), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(to_vec(mix.masses()), (std::vector<double>{0.25, 0.25, 0.25, 0.25}));

  const StepCdf zero({0}, {1});
  parts = {{0.3, zero}, {0.7, zero}};
  const auto merged = mix_step_cdfs(parts);
  EXPECT_EQ(to_vec(merged.knots()), (std::vector<double>{0}));
  EXPECT_DOUBLE_EQ(merged.masses()[0], 1.0);
}

TEST(MixStepCdfsTest, WeightsMustBeNormalized) {
  const StepCdf a({1}, {1});
  std::vector<WeightedCdf> parts{{0.5, a}, {0.4, a}};
  expect_code([&] { mix_step_cdfs(parts); }, ErrorCode::kWeightsNotNormalized);
  parts = {{1.5, a}, {-0.5, a}};
  expect_code([&] { mix_step_cdfs(parts); }, ErrorCode::kWeightsNotNormalized);
}

TEST(MixStepCdfsTest, PermutationInvariant) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t parts_n = 2 + gen() % 5;
    std::vector<WeightedCdf> parts;
    std::vector<double> w(parts_n);
    double total = 0;
    for (double& x : w) total += (x = 0.1 + std::uniform_real_distribution<>(0, 1)(gen));
    for (std::size_t i = 0; i < parts_n; ++i) {
      const auto xs = oracle::lumpy_sample(gen, 1 + gen() % 8);
      parts.push_back({w[i] / total, step_cdf_from_atoms(xs)});
    }
    const auto reference = mix_step_cdfs(parts);
    std::shuffle(parts.begin(), parts.end(), gen);
    EXPECT_EQ(mix_step_cdfs(parts), reference);
  }
}

TEST(MixStepCdfsTest, MatchesPooledAtomsOracle) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const StepCdf a = step_cdf_from_atoms(oracle::lumpy_sample(gen, 5));
    const StepCdf b = step_cdf_from_atoms(oracle::random_sample(gen, 3));
    std::vector<WeightedCdf> parts{{0.25, a}, {0.75, b}};
    const auto mix = mix_step_cdfs(parts);
    oracle::Atoms atoms;
    for (std::size_t i = 0; i < a.size(); ++i) atoms.emplace_back(a.knots()[i], 0.25 * a.masses()[i]);
    for (std::size_t i = 0; i < b.size(); ++i) atoms.emplace_back(b.knots()[i], 0.75 * b.masses()[i]);
    for (double x : mix.knots()) EXPECT_NEAR(mix(x), oracle::cdf_at(atoms, x), 1e-14);
  }
}

TEST(InvertStepCdfTest, Examples) {
  const StepCdf cdf({1, 2, 3, 4}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(invert_step_cdf(cdf, 0.25), 1);
  EXPECT_EQ(invert_step_cdf(cdf, 0.75), 3);
  const StepCdf single({7}, {1});
  for (double u : {1e-9, 0.3, 0.999999}) EXPECT_EQ(invert_step_cdf(single, u), 7);
  expect_code([&] { invert_step_cdf(cdf, 0.0); }, ErrorCode::kLevelOutOfRange);
  expect_code([&] { invert_step_cdf(cdf, 1.5); }, ErrorCode::kLevelOutOfRange);
}

TEST(InvertStepCdfTest, LeftContinuity) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WeightedCdf> parts{
        {0.3, step_cdf_from_atoms(oracle::lumpy_sample(gen, 1 + gen() % 9))},
        {0.7, step_cdf_from_atoms(oracle::random_sample(gen, 1 + gen() % 9))}};
    const auto cdf = mix_step_cdfs(parts);
    for (std::size_t i = 0; i < cdf.size(); ++i) {
      const double c = cdf.cumulative()[i];
      if (c >= 1.0) continue;
      EXPECT_EQ(invert_step_cdf(cdf, c), cdf.knots()[i]);
      if (i + 1 < cdf.size()) {
        EXPECT_EQ(invert_step_cdf(cdf, c + 1e-12), cdf.knots()[i + 1]);
      }
    }
  }
}

TEST(MixtureQuantilesTest, Examples) {
  const GridSpec grid(2);
  const QuantileSketch a(grid, {1, 3}, 2);
  const QuantileSketch b(grid, {2, 4}, 2);
  std::vector<WeightedSketch> parts{{1.0, a}};
  EXPECT_EQ(mixture_quantiles_on_grid(parts, grid), (std::vector<double>{1, 3}));
  parts = {{0.5, a}, {0.5, b}};
  EXPECT_EQ(mixture_quantiles_on_grid(parts, grid), (std::vector<double>{1, 3}));
  parts = {{1.0, a}, {0.0, b}};
  EXPECT_EQ(mixture_quantiles_on_grid(parts, grid), (std::vector<double>{1, 3}));
}

TEST(MixtureQuantilesTest, GridMismatch) {
  const QuantileSketch a(GridSpec(2), {1, 3}, 2);
  const QuantileSketch b(GridSpec(3), {1, 2, 3}, 2);
  std::vector<WeightedSketch> parts{{0.5, a}, {0.5, b}};
  expect_code([&] { mixture_quantiles_on_grid(parts, GridSpec(2)); },
              ErrorCode::kGridMismatch);
}

TEST(MixtureQuantilesTest, RoundTripIsExact) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 1 + gen() % 64;
    const double eps = trial % 3 == 0 ? 0.0 : 0.01 * static_cast<double>(gen() % 40);
    const GridSpec grid(k, eps);
    const auto xs = trial % 2 ? oracle::lumpy_sample(gen, 1 + gen() % 50)
                              : oracle::random_sample(gen, 1 + gen() % 50);
    const auto sk = build_sketch(xs, grid);
    std::vector<WeightedSketch> parts{{1.0, sk}};
    EXPECT_EQ(mixture_quantiles_on_grid(parts, grid), to_vec(sk.values()));
  }
}

TEST(MixtureQuantilesTest, MatchesPooledAtomsOracle) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + gen() % 20;
    const GridSpec grid(k);
    const auto a = build_sketch(oracle::lumpy_sample(gen, 1 + gen() % 30), grid);
    const auto b = build_sketch(oracle::random_sample(gen, 1 + gen() % 30), grid);
    std::vector<WeightedSketch> parts{{0.375, a}, {0.625, b}};
    const auto got = mixture_quantiles_on_grid(parts, grid);
    oracle::Atoms atoms = oracle::sketch_atoms(to_vec(a.values()), 0.375);
    for (const auto& at : oracle::sketch_atoms(to_vec(b.values()), 0.625)) atoms.push_back(at);
    for (std::size_t l = 0; l < k; ++l) {
      EXPECT_EQ(got[l], oracle::invert(atoms, grid.level(l)));
    }
    EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
  }
}

TEST(StepCdfApproximationTest, UniformWithinOneOverK) {
  for (std::size_t k : {1u, 2u, 5u, 16u, 101u}) {
    const GridSpec grid(k);
    const QuantileSketch sk(grid, grid.levels(), 1);
    const auto cdf = sketch_to_step_cdf(sk);
    double worst = 0;
    for (int i = 0; i <= 20000; ++i) {
      const double x = i / 20000.0;
      worst = std::max(worst, std::fabs(cdf(x) - x));
    }
    EXPECT_LE(worst, 1.0 / static_cast<double>(k) + 1e-15) << k;
  }
}

TEST(StepCdfApproximationTest, KnotPerturbationStability) {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> unit(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 2 + gen() % 30;
    const GridSpec grid(k);
    auto values = oracle::random_sample(gen, k);
    std::sort(values.begin(), values.end());
    const double eta = 0.3 * unit(gen);
    std::vector<double> shifted(values);
    for (double& v : shifted) v += eta * (2 * unit(gen) - 1);
    std::sort(shifted.begin(), shifted.end());
    const auto f = sketch_to_step_cdf(QuantileSketch(grid, values, 1));
    const auto g = sketch_to_step_cdf(QuantileSketch(grid, shifted, 1));
    for (int probe = 0; probe < 50; ++probe) {
      const double x = -3.5 + 7 * unit(gen);
      std::size_t near = 0;
      for (double v : values) near += (v > x - eta && v <= x + eta);
      EXPECT_LE(std::fabs(f(x) - g(x)),
                static_cast<double>(near) / static_cast<double>(k) + 1e-12);
    }
  }
}

}  // namespace
}  // namespace fedaudit
