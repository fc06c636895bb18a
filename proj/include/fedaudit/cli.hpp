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

#ifndef FEDAUDIT_CLI_HPP_
#define FEDAUDIT_CLI_HPP_

#include <ostream>

namespace fedaudit {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitMalformed = 3;

// Environment variable naming the directory that relative dataset paths are
// resolved against when they do not exist relative to the working directory.
inline constexpr const char* kDataDirEnv = "FEDAUDIT_DATA_DIR";

// Entry point of the fedaudit tool. Never throws; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fedaudit

#endif  // FEDAUDIT_CLI_HPP_
