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

#ifndef FEDAUDIT_NUMERIC_HPP_
#define FEDAUDIT_NUMERIC_HPP_

#include <cmath>
#include <span>

namespace fedaudit {

// Slack used whenever an accumulated probability mass is compared against a
// level u. Cumulative masses are accumulated with NeumaierSum, so their error
// is a few ulps; the slack stays strictly below 1e-12 so that a level placed
// 1e-12 above a cumulative mass selects the next knot.
inline constexpr double kMassSlack = 1e-13;

// Neumaier's variant of Kahan summation. Accumulation order is the call
// order, so results are reproducible bit for bit.
class NeumaierSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  NeumaierSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  NeumaierSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

// |x|^p for the two supported exponents, without calling pow.
inline double abs_pow(double x, int p) {
  return p == 1 ? std::fabs(x) : x * x;
}

}  // namespace fedaudit

#endif  // FEDAUDIT_NUMERIC_HPP_
