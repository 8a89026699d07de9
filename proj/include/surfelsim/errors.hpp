// Copyright 2026 The surfelsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace surfelsim {

// Error taxonomy mirrored by the CLI exit codes: usage/input 2, file format
// 3, quality floor 4, unresolved reference 5.

struct InputError : std::runtime_error {
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct QualityError : std::runtime_error {
  explicit QualityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ResolutionError : std::runtime_error {
  explicit ResolutionError(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace surfelsim
