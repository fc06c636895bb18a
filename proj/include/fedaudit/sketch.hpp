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

// Quantile sketches on the midpoint level grid and the atomic distributions
// they induce.
//
// A sketch of size k stores Q(u_1), ..., Q(u_k) at the levels
//
//   u_l = eps + (l - 1/2) (1 - 2 eps) / k,   l = 1..k,
//
// (eps = 0 gives the plain midpoint grid). Read as a distribution, a sketch
// is the uniform mixture of k atoms, one per stored value, and its CDF is a
// right-continuous step function. Quantiles are always the left-continuous
// generalized inverse Q(u) = inf{x : F(x) >= u}.

#ifndef FEDAUDIT_SKETCH_HPP_
#define FEDAUDIT_SKETCH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fedaudit {

class GridSpec {
 public:
  // Throws kInvalidArgument unless k >= 1 and trim_epsilon is in [0, 0.5).
  explicit GridSpec(std::size_t k, double trim_epsilon = 0.0);

  std::size_t k() const { return k_; }
  double trim_epsilon() const { return trim_epsilon_; }

  // Population level at which the l-th (0-based) quantile is evaluated.
  double level(std::size_t index) const;
  std::vector<double> levels() const;

  // Level of the l-th atom inside the sketch's own atomic distribution,
  // (l + 1/2) / k. Equal to level() when trim_epsilon == 0.
  double atom_level(std::size_t index) const;

  // Quadrature weight of one level: (1 - 2 eps) / k.
  double bin_width() const;

  bool operator==(const GridSpec&) const = default;

 private:
  std::size_t k_;
  double trim_epsilon_;
};

// k nondecreasing finite values on a grid, without a sample count. Used for
// derived curves such as mixture and barycenter quantiles.
class QuantileArray {
 public:
  // Throws kInvalidSketch if the length differs from grid.k() or the values
  // are not finite and nondecreasing.
  QuantileArray(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  bool operator==(const QuantileArray&) const = default;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

// The per-(silo, group) payload: k quantiles plus the sample count behind
// them.
class QuantileSketch {
 public:
  QuantileSketch(GridSpec grid, std::vector<double> values,
                 std::uint64_t count);

  const GridSpec& grid() const { return quantiles_.grid(); }
  std::span<const double> values() const { return quantiles_.values(); }
  std::uint64_t count() const { return count_; }
  const QuantileArray& quantiles() const { return quantiles_; }

  bool operator==(const QuantileSketch&) const = default;

 private:
  QuantileArray quantiles_;
  std::uint64_t count_;
};

// Atomic distribution: strictly increasing knots with positive masses that
// sum to one.
class StepCdf {
 public:
  // Throws kInvalidArgument when the invariants do not hold (mass total is
  // checked to 1e-12).
  StepCdf(std::vector<double> knots, std::vector<double> masses);

  std::span<const double> knots() const { return knots_; }
  std::span<const double> masses() const { return masses_; }
  // cumulative()[i] = mass of knots[0..i], compensated.
  std::span<const double> cumulative() const { return cumulative_; }
  std::size_t size() const { return knots_.size(); }

  // Sum of masses whose knot is <= x.
  double operator()(double x) const;

  bool operator==(const StepCdf&) const = default;

 private:
  std::vector<double> knots_;
  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

struct WeightedCdf {
  double weight;
  StepCdf cdf;
};

struct WeightedSketch {
  double weight;
  QuantileSketch sketch;
};

// samples[ceil(u n)] (1-based) of an ascending sample: the left-continuous
// inverse of the empirical CDF. Errors: kEmptySample, kLevelOutOfRange.
double empirical_quantile(std::span<const double> sorted_samples, double u);

// Sorts a copy of the samples and evaluates empirical_quantile at every grid
// level. Errors: kEmptySample.
QuantileSketch build_sketch(std::span<const double> samples,
                            const GridSpec& grid);

// Same as build_sketch for input already sorted ascending.
QuantileSketch build_sketch_sorted(std::span<const double> sorted_samples,
                                   const GridSpec& grid);

// Knots are the distinct sketch values; each carries multiplicity / k.
StepCdf sketch_to_step_cdf(const QuantileSketch& sketch);

// Equal-mass atoms at the given (not necessarily sorted) values.
StepCdf step_cdf_from_atoms(std::span<const double> values);

// Weighted mixture. Weights must be nonnegative and sum to one within 1e-9
// (kWeightsNotNormalized); they are renormalized exactly before mixing.
// The result does not depend on the order of the parts.
StepCdf mix_step_cdfs(std::span<const WeightedCdf> parts);

// Smallest knot whose cumulative mass is >= u (up to kMassSlack).
// Errors: kLevelOutOfRange.
double invert_step_cdf(const StepCdf& cdf, double u);

// invert_step_cdf at each of the grid's atom levels.
std::vector<double> invert_on_grid(const StepCdf& cdf, const GridSpec& grid);

// Mixes the sketches' atomic distributions and inverts the mixture at the
// grid's atom levels. Errors: kGridMismatch when a sketch is on another grid.
std::vector<double> mixture_quantiles_on_grid(
    std::span<const WeightedSketch> parts, const GridSpec& grid);

}  // namespace fedaudit

#endif  // FEDAUDIT_SKETCH_HPP_
