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

#ifndef FEDAUDIT_ERROR_HPP_
#define FEDAUDIT_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fedaudit {

// Every failure surfaced by the library carries one of these codes. The
// string form (code_name) is stable and appears in CLI diagnostics.
enum class ErrorCode {
  kEmptySample,
  kLevelOutOfRange,
  kWeightsNotNormalized,
  kGridMismatch,
  kUnsupportedP,
  kDegenerateWeights,
  kKTooSmall,
  kTwoGroupsOnly,
  kInvalidArgument,
  kInvalidSketch,
  kEmptySilo,
  kNoMessages,
  kUnknownGroupWeights,
  kTooFewGroups,
  kDuplicateSilo,
  kMalformedMessage,
  kUnsupportedVersion,
  kDeltaOutOfRange,
  kMarginMismatch,
  kDegenerateCorrelation,
  kIo,
  kDataset,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptySample: return "empty-sample";
    case ErrorCode::kLevelOutOfRange: return "level-out-of-range";
    case ErrorCode::kWeightsNotNormalized: return "weights-not-normalized";
    case ErrorCode::kGridMismatch: return "grid-mismatch";
    case ErrorCode::kUnsupportedP: return "unsupported-p";
    case ErrorCode::kDegenerateWeights: return "degenerate-weights";
    case ErrorCode::kKTooSmall: return "k-too-small";
    case ErrorCode::kTwoGroupsOnly: return "two-groups-only";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidSketch: return "invalid-sketch";
    case ErrorCode::kEmptySilo: return "empty-silo";
    case ErrorCode::kNoMessages: return "no-messages";
    case ErrorCode::kUnknownGroupWeights: return "unknown-group-weights";
    case ErrorCode::kTooFewGroups: return "too-few-groups";
    case ErrorCode::kDuplicateSilo: return "duplicate-silo";
    case ErrorCode::kMalformedMessage: return "malformed-message";
    case ErrorCode::kUnsupportedVersion: return "unsupported-version";
    case ErrorCode::kDeltaOutOfRange: return "delta-out-of-range";
    case ErrorCode::kMarginMismatch: return "margin-mismatch";
    case ErrorCode::kDegenerateCorrelation: return "degenerate-correlation";
    case ErrorCode::kIo: return "io-error";
    case ErrorCode::kDataset: return "dataset-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(code_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

// True for errors caused by undecodable input rather than by a decodable
// input that violates a protocol precondition. Drives the CLI exit code.
constexpr bool is_malformed_input(ErrorCode code) {
  return code == ErrorCode::kMalformedMessage ||
         code == ErrorCode::kUnsupportedVersion ||
         code == ErrorCode::kInvalidSketch || code == ErrorCode::kIo ||
         code == ErrorCode::kDataset;
}

}  // namespace fedaudit

#endif  // FEDAUDIT_ERROR_HPP_
