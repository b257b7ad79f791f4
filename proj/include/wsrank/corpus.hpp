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

// Queries, passages, candidate sets and optional gold judgments.
//
// On disk a dataset is JSONL with two record kinds:
//   {"kind":"passage","id":"p1","text":"..."}
//   {"kind":"query","id":"q1","text":"...","candidates":["p1","p2"],"gold":{"p1":1}}
// Gold values are 1 (relevant) or 0 (non-relevant); the field is optional.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wsrank {

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split split);
Split parse_split(std::string_view name);  // throws InputError

struct Query {
  std::string id;
  std::string text;
};

struct Passage {
  std::string id;
  std::string text;
};

struct CandidateSet {
  std::string query_id;
  std::vector<std::string> passage_ids;  // file order, never a relevance signal
  // Absent when the source has no judgments for this query. When present,
  // candidates missing from the map count as non-relevant.
  std::optional<std::map<std::string, bool>> gold;

  bool is_relevant(const std::string& passage_id) const;
};

/// Immutable after load. Lookup maps are rebuilt by reindex().
class Dataset {
 public:
  Split split = Split::kTrain;
  std::vector<Query> queries;
  std::vector<Passage> passages;
  std::vector<CandidateSet> candidate_sets;  // one per query, in file order

  void reindex();

  const Query* find_query(std::string_view id) const;
  const Passage* find_passage(std::string_view id) const;
  const CandidateSet* find_candidates(std::string_view query_id) const;

  std::size_t pair_count() const;
  bool has_gold() const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::unordered_map<std::string, std::size_t> query_index_;
  std::unordered_map<std::string, std::size_t> passage_index_;
};

struct Violation {
  std::string entity;     // e.g. "query q3" or "candidate q3/p9"
  std::string invariant;  // what is broken
};

/// Every broken invariant, in deterministic order. Empty iff the dataset is valid.
std::vector<Violation> validate(const Dataset& dataset);

/// Query ids shared between two splits.
std::vector<Violation> split_overlap(const Dataset& a, const Dataset& b);

/// Parses JSONL. Throws InputError for malformed lines (with line number),
/// duplicate ids, dangling references, or an input without queries.
Dataset parse_dataset(std::istream& in, Split split);
Dataset load_dataset(const std::filesystem::path& path, Split split);

/// Passages first (in order), then queries (in order), one JSON object per line.
void write_dataset(const Dataset& dataset, std::ostream& out);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace wsrank
