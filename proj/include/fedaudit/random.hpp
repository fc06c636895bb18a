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

// Deterministic random streams.
//
// CounterRng is a counter-based generator: the i-th output is the SplitMix64
// finalizer applied to key + i * 0x9E3779B97F4A7C15. It is fully specified by
// (key, counter), so every stream is reproducible across platforms and can be
// split without shared state. Independent sub-streams come from derive_seed.

#ifndef FEDAUDIT_RANDOM_HPP_
#define FEDAUDIT_RANDOM_HPP_

#include <cstdint>
#include <string_view>

namespace fedaudit {

std::uint64_t mix64(std::uint64_t z);

// seed XOR hash(tag, index).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t index = 0);

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // (0, 1), never 0 or 1.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }
  // Uniform integer in [0, n), unbiased. n must be >= 1.
  std::uint64_t below(std::uint64_t n);

  // Standard normal by inversion of uniform_open().
  double normal();
  // Marsaglia-Tsang; shape < 1 uses the Gamma(shape + 1) * U^(1/shape) boost.
  double gamma(double shape);
  // Gamma ratio X / (X + Y).
  double beta(double a, double b);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fedaudit

#endif  // FEDAUDIT_RANDOM_HPP_
