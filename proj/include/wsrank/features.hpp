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

// Pair features for the scorer:
//   [query vec (e) | passage vec (e) | elementwise product (e) | one score per source]
// The trailing scalar scores are standardized with constants taken from the
// training split and frozen into the model.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wsrank/corpus.hpp"
#include "wsrank/labeling.hpp"

namespace wsrank {

struct ScalarFeature {
  LabelingFunction source;
  double mean = 0.0;
  double stddev = 1.0;
};

struct FeatureSchema {
  std::string dense_store;  // empty: no dense block
  std::size_t embedding_dim = 0;
  TokenizerConfig tokenizer;
  std::vector<ScalarFeature> scalars;

  std::size_t dim() const { return 3 * embedding_dim + scalars.size(); }
  std::vector<std::string> feature_names() const;
};

/// Pair -> feature row lookup over one dataset.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return keys_.size(); }

  void add(const std::string& query_id, const std::string& passage_id, std::span<const double> row);
  std::span<double> mutable_row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  /// Throws InputError naming the pair when it has no features.
  std::span<const double> at(std::string_view query_id, std::string_view passage_id) const;
  bool contains(std::string_view query_id, std::string_view passage_id) const;

 private:
  static std::string key(std::string_view q, std::string_view p);

  std::size_t dim_ = 0;
  std::vector<double> data_;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Schema with standardization constants (population mean and standard
/// deviation over every candidate pair of `train`; a zero deviation becomes 1).
FeatureSchema fit_feature_schema(const Dataset& train, const std::string& dense_store,
                                 std::span<const LabelingFunction> scalar_sources,
                                 const ScoreResources& resources, int threads = 1);

/// Features of every candidate pair of `dataset`.
FeatureTable featurize_dataset(const Dataset& dataset, const FeatureSchema& schema,
                               const ScoreResources& resources, int threads = 1);

/// Features of one pair.
std::vector<double> featurize(const Dataset& dataset, std::string_view query_id,
                              std::string_view passage_id, const FeatureSchema& schema,
                              const ScoreResources& resources);

}  // namespace wsrank
