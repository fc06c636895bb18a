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

// Serialization of silo messages and audit reports.
//
// Binary layout of a silo message (normative, little-endian, no padding):
//
//   "FQS1"                      magic + format version
//   u16  silo id length, then that many UTF-8 bytes
//   u32  k
//   f64  trim epsilon
//   u16  group count
//   per group:
//     u16 label length, then that many UTF-8 bytes
//     u64 sample count
//     k x f64 quantile values
//
// The JSON mirror uses the same field names and exists for debugging.

#ifndef FEDAUDIT_WIRE_HPP_
#define FEDAUDIT_WIRE_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "fedaudit/protocol.hpp"

namespace fedaudit {

inline constexpr char kWireMagic[3] = {'F', 'Q', 'S'};
inline constexpr char kWireVersion = '1';

// Errors: kInvalidArgument when ids or labels are not UTF-8 or k exceeds u32.
std::vector<std::uint8_t> encode_message(const SiloMessage& msg);

// Errors: kMalformedMessage (truncation, trailing bytes, bad lengths, bad
// UTF-8, invalid grid, duplicate labels), kUnsupportedVersion, kInvalidSketch
// (non-finite or decreasing values).
SiloMessage decode_message(std::span<const std::uint8_t> bytes);

nlohmann::json message_to_json(const SiloMessage& msg);
SiloMessage message_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const AuditReport& report);

}  // namespace fedaudit

#endif  // FEDAUDIT_WIRE_HPP_
