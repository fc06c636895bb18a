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

#include "fedaudit/bounds.hpp"

#include <cmath>
#include <string>

#include "fedaudit/error.hpp"

namespace fedaudit {
namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::kDeltaOutOfRange,
                "delta " + std::to_string(delta) + " not in (0,1)");
  }
}

void check_positive(std::uint64_t v, const char* name) {
  if (v == 0) throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be >= 1");
}

void check_inputs(const BoundInputs& in) {
  check_positive(in.n_min, "n_min");
  check_positive(in.k, "k");
  check_positive(in.d, "d");
  check_positive(in.groups, "groups");
  check_delta(in.delta);
  if (!(in.m_eps > 0.0) || !std::isfinite(in.m_eps)) {
    throw Error(ErrorCode::kInvalidArgument, "m_eps must be positive");
  }
  if (!(in.eps > 0.0 && in.eps < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must be in (0, 1/2)");
  }
}

double as_double(std::uint64_t v) { return static_cast<double>(v); }

}  // namespace

double dkw_bound(std::uint64_t n, double delta) {
  check_positive(n, "n");
  check_delta(delta);
  return std::sqrt(std::log(2.0 / delta) / (2.0 * as_double(n)));
}

double hp_quantile_bound(const BoundInputs& in) {
  check_inputs(in);
  const double cells = 2.0 * (as_double(in.k) + 1.0) * as_double(in.d) *
                       as_double(in.groups);
  return std::sqrt(std::log(cells / in.delta) / (2.0 * as_double(in.n_min))) /
         in.m_eps;
}

WeightBounds weight_bounds(std::uint64_t n, std::uint64_t n_s_min,
                           std::uint64_t d, std::uint64_t groups, double delta) {
  check_positive(n, "n");
  check_positive(n_s_min, "n_s_min");
  check_positive(d, "d");
  check_positive(groups, "groups");
  check_delta(delta);
  const double g = as_double(groups);
  return {
      std::sqrt(std::log(2.0 * g / delta) / (2.0 * as_double(n))),
      std::sqrt(std::log(2.0 * as_double(d) * g / delta) /
                (2.0 * as_double(n_s_min))),
  };
}

std::uint64_t communication_budget(std::uint64_t d, std::uint64_t k,
                                   std::uint64_t groups) {
  return d * groups * (k + 1);
}

double g_hat_error_scale(const BoundInputs& in, double c_eps) {
  check_inputs(in);
  const double cells =
      (as_double(in.k) + 1.0) * as_double(in.d) * as_double(in.groups);
  return c_eps * (1.0 / as_double(in.k) +
                  std::sqrt(std::log(cells / in.delta) / as_double(in.n_min)));
}

}  // namespace fedaudit
