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

// Labeling functions: per-query score ranking turned into weak labels.
// For a query with m candidates the top-ranked passage gets +1, the bottom
// floor(m/2) get -1 and the rest abstain (0). Ties rank by ascending
// passage id.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsrank/artifact.hpp"
#include "wsrank/corpus.hpp"
#include "wsrank/embeddings.hpp"
#include "wsrank/lexical.hpp"

namespace wsrank {

enum class WeakLabel : std::int8_t { kNegative = -1, kAbstain = 0, kPositive = 1 };

inline int to_int(WeakLabel l) { return static_cast<int>(l); }
WeakLabel weak_label_from_int(int v);  // throws InputError outside {-1, 0, 1}

struct ScoredPassage {
  std::string passage_id;
  double score = 0.0;
};

struct LabelingOptions {
  // Give +1 to every passage tied with the top score (outside the bottom
  // block) instead of only the first by id.
  bool multi_positive_ties = false;
};

/// Labels parallel to `scores`. Empty input yields an empty result; a single
/// candidate gets +1 and a warning.
std::vector<WeakLabel> scores_to_labels(std::span<const ScoredPassage> scores,
                                        const LabelingOptions& options = {});

enum class ScoreKind { kBm25, kTfidf, kEmbedding };

struct LabelingFunction {
  std::string name;
  ScoreKind kind = ScoreKind::kBm25;
  std::string store;  // embedding store name when kind == kEmbedding
  Bm25Params bm25;
};

struct ScoreResources {
  const CorpusStats* stats = nullptr;
  std::map<std::string, const EmbeddingStore*, std::less<>> stores;

  const EmbeddingStore& store(const std::string& name) const;  // throws InputError
};

/// Raw scores of one labeling function for one query's candidates, in
/// candidate order.
std::vector<double> score_candidates(const Dataset& dataset, const CandidateSet& set,
                                     const LabelingFunction& fn,
                                     const ScoreResources& resources);

struct PairKey {
  std::string query_id;
  std::string passage_id;
  friend bool operator==(const PairKey&, const PairKey&) = default;
};

/// n pairs x k labeling functions. Rows are grouped by query, queries in
/// dataset order and passages in candidate order.
class LabelMatrix {
 public:
  std::vector<std::string> functions;
  std::vector<PairKey> pairs;
  std::vector<std::size_t> query_offsets;  // rows of query q: [off[q], off[q+1])
  std::vector<WeakLabel> labels;           // row-major

  std::size_t rows() const { return pairs.size(); }
  std::size_t cols() const { return functions.size(); }
  std::size_t query_count() const { return query_offsets.empty() ? 0 : query_offsets.size() - 1; }

  std::span<const WeakLabel> row(std::size_t i) const { return {labels.data() + i * cols(), cols()}; }
  WeakLabel at(std::size_t i, std::size_t j) const { return labels[i * cols() + j]; }

  /// Matrix restricted to the given columns (in the given order).
  LabelMatrix select_columns(std::span<const std::size_t> columns) const;

  /// Rebuilds query_offsets from consecutive runs of query ids.
  void rebuild_offsets();

  friend bool operator==(const LabelMatrix&, const LabelMatrix&) = default;
};

struct ApplyOptions {
  LabelingOptions labeling;
  int threads = 1;
};

LabelMatrix apply_labeling_functions(const Dataset& dataset,
                                     std::span<const LabelingFunction> functions,
                                     const ScoreResources& resources,
                                     const ApplyOptions& options = {});

/// Per (query, column) block: one +1 and floor(m/2) -1 when m >= 2. Returns
/// a description of every block that breaks this.
std::vector<std::string> check_label_histogram(const LabelMatrix& matrix);

void write_label_matrix(const LabelMatrix& matrix, std::ostream& out,
                        const std::optional<Provenance>& provenance = std::nullopt);
LabelMatrix read_label_matrix(std::istream& in);
LabelMatrix load_label_matrix(const std::filesystem::path& path);

}  // namespace wsrank
