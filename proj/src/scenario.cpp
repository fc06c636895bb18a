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

#include "fedaudit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedaudit/error.hpp"
#include "fedaudit/numeric.hpp"
#include "fedaudit/random.hpp"

namespace fedaudit {

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kRandom: return "random";
    case Regime::kPositive: return "positive";
    case Regime::kNegative: return "negative";
  }
  return "random";
}

Regime parse_regime(std::string_view name) {
  if (name == "random") return Regime::kRandom;
  if (name == "positive") return Regime::kPositive;
  if (name == "negative") return Regime::kNegative;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown regime '" + std::string(name) + "'");
}

std::uint64_t ContingencyTable::group_total(std::size_t group) const {
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < silos_; ++j) total += at(j, group);
  return total;
}

std::uint64_t ContingencyTable::silo_total(std::size_t silo_row) const {
  std::uint64_t total = 0;
  for (std::size_t g = 0; g < groups_; ++g) total += at(silo_row, g);
  return total;
}

Assignment allocate_random(std::size_t n, std::uint32_t d, std::uint64_t seed) {
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "d must be >= 1");
  CounterRng rng(derive_seed(seed, "allocate-random"));
  Assignment out(n);
  for (auto& a : out) a = static_cast<std::uint32_t>(rng.below(d)) + 1;
  return out;
}

ContingencyTable contingency_table(std::span<const std::uint32_t> assignment,
                                   std::span<const std::uint32_t> group_index,
                                   std::uint32_t d, std::size_t groups) {
  if (assignment.size() != group_index.size()) {
    throw Error(ErrorCode::kInvalidArgument, "assignment/group size mismatch");
  }
  ContingencyTable table(d, groups);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] < 1 || assignment[i] > d || group_index[i] >= groups) {
      throw Error(ErrorCode::kInvalidArgument, "silo or group out of range");
    }
    ++table.at(assignment[i] - 1, group_index[i]);
  }
  return table;
}

Assignment allocate_copula(std::span<const double> scores,
                           std::span<const std::uint32_t> group_index,
                           const ContingencyTable& margins, double rho,
                           Regime regime, std::uint64_t seed) {
  const std::size_t n = scores.size();
  if (group_index.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "scores/groups size mismatch");
  }
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rho must be in [0, 1)");
  }
  const std::size_t groups = margins.groups();
  std::vector<std::uint64_t> group_counts(groups, 0);
  for (std::uint32_t g : group_index) {
    if (g >= groups) {
      throw Error(ErrorCode::kMarginMismatch, "group id outside the margin table");
    }
    ++group_counts[g];
  }
  for (std::size_t g = 0; g < groups; ++g) {
    if (margins.group_total(g) != group_counts[g]) {
      throw Error(ErrorCode::kMarginMismatch,
                  "margins for group " + std::to_string(g) + " sum to " +
                      std::to_string(margins.group_total(g)) + ", group has " +
                      std::to_string(group_counts[g]));
    }
  }
  if (regime == Regime::kRandom) rho = 0.0;

  // Randomized rank transform: ties in score are ordered by random keys.
  CounterRng tie_rng(derive_seed(seed, "copula-ties"));
  std::vector<std::uint64_t> tie_key(n);
  for (auto& key : tie_key) key = tie_rng.next_u64();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    if (tie_key[a] != tie_key[b]) return tie_key[a] < tie_key[b];
    return a < b;
  });

  // Work with the latent on the normal scale: Phi is increasing, so the
  // within-group order of U_i = Phi(latent_i) is the order of latent_i, and
  // U -> 1 - U is latent -> -latent.
  CounterRng noise_rng(derive_seed(seed, "copula-noise"));
  const double noise_scale = std::sqrt(1.0 - rho * rho);
  std::vector<double> latent(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t i = order[pos];
    const double r = static_cast<double>(pos + 1) / static_cast<double>(n + 1);
    latent[i] = rho * normal_quantile(r);
  }
  for (std::size_t i = 0; i < n; ++i) {
    latent[i] += noise_scale * noise_rng.normal();
    if (regime == Regime::kNegative && group_index[i] == 0) latent[i] = -latent[i];
  }

  std::vector<std::vector<std::size_t>> members(groups);
  for (std::size_t i = 0; i < n; ++i) members[group_index[i]].push_back(i);
  Assignment out(n, 0);
  for (std::size_t g = 0; g < groups; ++g) {
    auto& idx = members[g];
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return latent[a] < latent[b] || (latent[a] == latent[b] && a < b);
    });
    std::size_t pos = 0;
    for (std::size_t j = 0; j < margins.silos(); ++j) {
      for (std::uint64_t c = 0; c < margins.at(j, g); ++c) {
        out[idx[pos++]] = static_cast<std::uint32_t>(j + 1);
      }
    }
  }
  return out;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = mean_rank;
    i = j;
  }
  return ranks;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "correlation needs n >= 2 pairs");
  }
  const double n = static_cast<double>(x.size());
  const double mx = compensated_sum(x) / n;
  const double my = compensated_sum(y) / n;
  NeumaierSum sxy;
  NeumaierSum sxx;
  NeumaierSum syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (!(sxx.value() > 0.0) || !(syy.value() > 0.0)) {
    throw Error(ErrorCode::kDegenerateCorrelation, "zero variance");
  }
  return sxy.value() / std::sqrt(sxx.value() * syy.value());
}

Dependence dependence_diagnostics(std::span<const double> scores,
                                  std::span<const std::uint32_t> assignment) {
  if (scores.size() != assignment.size()) {
    throw Error(ErrorCode::kInvalidArgument, "scores/assignment size mismatch");
  }
  std::vector<double> silo(assignment.begin(), assignment.end());
  Dependence out{};
  out.pearson = pearson_correlation(scores, silo);
  const auto rz = average_ranks(scores);
  const auto ra = average_ranks(silo);
  out.spearman = pearson_correlation(rz, ra);
  return out;
}

std::vector<double> sample_beta(double alpha, double beta, std::size_t n,
                                std::uint64_t seed) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta shapes must be positive");
  }
  CounterRng rng(derive_seed(seed, "beta"));
  std::vector<double> out(n);
  for (auto& x : out) {
    do {
      x = rng.beta(alpha, beta);
    } while (!(x > 0.0 && x < 1.0));
  }
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::kLevelOutOfRange, "normal quantile level not in (0,1)");
  }
  const double q = u - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

}  // namespace fedaudit
