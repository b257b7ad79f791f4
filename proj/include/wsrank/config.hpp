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

// Pipeline configuration read from a TOML-style file.
//
// Supported syntax: [section] headers, key = value lines, '#' comments.
// Values are double-quoted strings, integers, floats, true/false, or
// single-line arrays of strings. Unknown sections and keys are errors.
// Relative paths resolve against the directory holding the config file.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wsrank/aggregation.hpp"
#include "wsrank/labeling.hpp"
#include "wsrank/lexical.hpp"
#include "wsrank/trainer.hpp"

namespace wsrank {

using ConfigValue = std::variant<std::string, std::int64_t, double, bool, std::vector<std::string>>;

/// section -> key -> value; top-level keys live in section "".
using ConfigTable = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Throws InputError with the line number on malformed input.
ConfigTable parse_config_table(std::istream& in);

struct PipelineConfig {
  std::filesystem::path base_dir;

  // [data]
  std::filesystem::path train_path;
  std::optional<std::filesystem::path> val_path;
  std::optional<std::filesystem::path> test_path;
  std::string eval_split = "test";  // falls back to train when no test path

  // [embeddings] store name -> EMB1 file
  std::map<std::string, std::filesystem::path> embeddings;

  TokenizerConfig tokenizer;
  Bm25Params bm25;

  // [labeling]
  std::vector<LabelingFunction> functions;
  LabelingOptions labeling;

  // [aggregation]
  AggregationMethod method = AggregationMethod::kGenerative;
  double gamma = 0.5;
  FitOptions fit;

  // [triplets]
  std::size_t per_query_samples = kDefaultSamplesPerQuery;

  // [train]
  TrainOptions train;
  std::string feature_embedding;             // dense block store, empty for none
  std::vector<std::string> feature_scores;   // labeling function names

  // [run]
  std::uint64_t seed = 0;
  int threads = 1;
  std::filesystem::path out_dir = "out";

  /// Canonical text of every setting that affects artifacts (not seed,
  /// threads or out_dir).
  std::string canonical() const;
  /// FNV-1a of canonical().
  std::string hash() const;

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  std::filesystem::path eval_path() const;
  const LabelingFunction& function(const std::string& name) const;  // throws InputError
};

/// Builds a config from parsed sections. Errors name the offending field as
/// "section.key".
PipelineConfig config_from_table(const ConfigTable& table, const std::filesystem::path& base_dir);

PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir);

/// Markdown reference of every key with its default.
std::string config_reference();

}  // namespace wsrank
