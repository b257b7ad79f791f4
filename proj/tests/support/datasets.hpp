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

// Small hand-built datasets for unit tests.

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wsrank/corpus.hpp"

namespace wsrank::testdata {

struct Doc {
  std::string id;
  std::string text;
  std::optional<bool> relevant;
};

struct Q {
  std::string id;
  std::string text;
  std::vector<Doc> docs;
};

inline Dataset build(const std::vector<Q>& queries, Split split = Split::kTrain) {
  Dataset ds;
  ds.split = split;
  for (const auto& q : queries) {
    ds.queries.push_back({q.id, q.text});
    CandidateSet set;
    set.query_id = q.id;
    std::map<std::string, bool> gold;
    bool has_gold = false;
    for (const auto& d : q.docs) {
      ds.passages.push_back({d.id, d.text});
      set.passage_ids.push_back(d.id);
      if (d.relevant) {
        has_gold = true;
        gold[d.id] = *d.relevant;
      }
    }
    if (has_gold) set.gold = gold;
    ds.candidate_sets.push_back(std::move(set));
  }
  ds.reindex();
  return ds;
}

inline Dataset parse(const std::string& jsonl, Split split = Split::kTrain) {
  std::istringstream in(jsonl);
  return parse_dataset(in, split);
}

}  // namespace wsrank::testdata
