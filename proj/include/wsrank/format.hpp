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

// Text helpers for the TSV/CSV artifacts.

#include <string>
#include <string_view>
#include <vector>

namespace wsrank {

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

double parse_double(std::string_view text);  // throws InputError
int parse_int(std::string_view text);        // throws InputError

std::vector<std::string> split_fields(std::string_view line, char sep);

}  // namespace wsrank
