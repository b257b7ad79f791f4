// Copyright 2026 The wsrank Authors
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

// Provenance stamped into every stage artifact so it can be reproduced.

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace wsrank {

inline constexpr int kArtifactVersion = 1;

struct Provenance {
  std::string stage;
  std::string config_hash;
  std::uint64_t seed = 0;
  int version = kArtifactVersion;
};

/// "# wsrank stage=<s> version=<v> config_hash=<h> seed=<n>" (no newline).
std::string provenance_comment(const Provenance& p);
nlohmann::ordered_json provenance_json(const Provenance& p);

/// Reads the next line that is not a '#' comment. False at end of input.
bool next_data_line(std::istream& in, std::string& line);

/// FNV-1a 64-bit, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace wsrank
