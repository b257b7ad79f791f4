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

#include "wsrank/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wsrank/error.hpp"

namespace wsrank {

using nlohmann::json;

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
    case Split::kTrain:
      break;
  }
  return "train";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw InputError("unknown split '" + std::string(name) + "'");
}

bool CandidateSet::is_relevant(const std::string& passage_id) const {
  if (!gold) return false;
  auto it = gold->find(passage_id);
  return it != gold->end() && it->second;
}

void Dataset::reindex() {
  query_index_.clear();
  passage_index_.clear();
  for (std::size_t i = 0; i < queries.size(); ++i) query_index_.emplace(queries[i].id, i);
  for (std::size_t i = 0; i < passages.size(); ++i) {
    passage_index_.emplace(passages[i].id, i);
  }
}

const Query* Dataset::find_query(std::string_view id) const {
  auto it = query_index_.find(std::string(id));
  return it == query_index_.end() ? nullptr : &queries[it->second];
}

const Passage* Dataset::find_passage(std::string_view id) const {
  auto it = passage_index_.find(std::string(id));
  return it == passage_index_.end() ? nullptr : &passages[it->second];
}

const CandidateSet* Dataset::find_candidates(std::string_view query_id) const {
  auto it = query_index_.find(std::string(query_id));
  if (it == query_index_.end() || it->second >= candidate_sets.size()) return nullptr;
  const CandidateSet& set = candidate_sets[it->second];
  return set.query_id == query_id ? &set : nullptr;
}

std::size_t Dataset::pair_count() const {
  std::size_t n = 0;
  for (const auto& set : candidate_sets) n += set.passage_ids.size();
  return n;
}

bool Dataset::has_gold() const {
  for (const auto& set : candidate_sets) {
    if (set.gold) return true;
  }
  return false;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.split != b.split || a.queries.size() != b.queries.size() ||
      a.passages.size() != b.passages.size() ||
      a.candidate_sets.size() != b.candidate_sets.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.queries.size(); ++i) {
    if (a.queries[i].id != b.queries[i].id || a.queries[i].text != b.queries[i].text) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.passages.size(); ++i) {
    if (a.passages[i].id != b.passages[i].id || a.passages[i].text != b.passages[i].text) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.candidate_sets.size(); ++i) {
    const auto& x = a.candidate_sets[i];
    const auto& y = b.candidate_sets[i];
    if (x.query_id != y.query_id || x.passage_ids != y.passage_ids || x.gold != y.gold) {
      return false;
    }
  }
  return true;
}

std::vector<Violation> validate(const Dataset& dataset) {
  std::vector<Violation> out;
  std::set<std::string> query_ids;
  std::set<std::string> passage_ids;

  if (dataset.queries.empty()) out.push_back({"dataset", "no queries"});
  for (const auto& q : dataset.queries) {
    if (q.id.empty()) out.push_back({"query", "empty id"});
    if (!query_ids.insert(q.id).second) out.push_back({"query " + q.id, "duplicate id"});
    if (q.text.empty()) out.push_back({"query " + q.id, "empty text"});
  }
  for (const auto& p : dataset.passages) {
    if (p.id.empty()) out.push_back({"passage", "empty id"});
    if (!passage_ids.insert(p.id).second) {
      out.push_back({"passage " + p.id, "duplicate id"});
    }
  }
  if (dataset.candidate_sets.size() != dataset.queries.size()) {
    out.push_back({"dataset", "candidate set count differs from query count"});
  }
  for (const auto& set : dataset.candidate_sets) {
    const std::string who = "query " + set.query_id;
    if (!query_ids.contains(set.query_id)) {
      out.push_back({who, "candidate set references unknown query"});
    }
    if (set.passage_ids.empty()) out.push_back({who, "empty candidate list"});
    std::set<std::string> seen;
    for (const auto& pid : set.passage_ids) {
      if (!passage_ids.contains(pid)) {
        out.push_back({"candidate " + set.query_id + "/" + pid,
                       "references unknown passage"});
      }
      if (!seen.insert(pid).second) {
        out.push_back({"candidate " + set.query_id + "/" + pid, "duplicate candidate"});
      }
    }
    if (set.gold) {
      for (const auto& [pid, rel] : *set.gold) {
        if (!seen.contains(pid)) {
          out.push_back({"gold " + set.query_id + "/" + pid,
                         "gold label on non-candidate passage"});
        }
      }
    }
  }
  return out;
}

std::vector<Violation> split_overlap(const Dataset& a, const Dataset& b) {
  std::set<std::string> ids;
  for (const auto& q : a.queries) ids.insert(q.id);
  std::vector<Violation> out;
  for (const auto& q : b.queries) {
    if (ids.contains(q.id)) {
      out.push_back({"query " + q.id, "present in both " + std::string(split_name(a.split)) +
                                          " and " + std::string(split_name(b.split))});
    }
  }
  return out;
}

namespace {

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
  throw InputError("dataset line " + std::to_string(line) + ": " + what);
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    fail_at(line, std::string("missing or non-string field '") + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Dataset parse_dataset(std::istream& in, Split split) {
  Dataset ds;
  ds.split = split;
  std::set<std::string> query_ids;
  std::set<std::string> passage_ids;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      fail_at(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) fail_at(line_no, "record is not a JSON object");
    const std::string kind = require_string(obj, "kind", line_no);
    const std::string id = require_string(obj, "id", line_no);
    if (id.empty()) fail_at(line_no, "empty id");
    if (kind == "passage") {
      if (!passage_ids.insert(id).second) fail_at(line_no, "duplicate passage id '" + id + "'");
      ds.passages.push_back({id, require_string(obj, "text", line_no)});
    } else if (kind == "query") {
      if (!query_ids.insert(id).second) fail_at(line_no, "duplicate query id '" + id + "'");
      std::string qtext = require_string(obj, "text", line_no);
      if (qtext.empty()) fail_at(line_no, "query '" + id + "' has empty text");
      CandidateSet set;
      set.query_id = id;
      auto cands = obj.find("candidates");
      if (cands == obj.end() || !cands->is_array()) {
        fail_at(line_no, "query '" + id + "' lacks a candidates array");
      }
      for (const auto& c : *cands) {
        if (!c.is_string()) fail_at(line_no, "non-string candidate id in '" + id + "'");
        set.passage_ids.push_back(c.get<std::string>());
      }
      if (auto g = obj.find("gold"); g != obj.end() && !g->is_null()) {
        if (!g->is_object()) fail_at(line_no, "gold of '" + id + "' is not an object");
        std::map<std::string, bool> gold;
        for (const auto& [pid, v] : g->items()) {
          if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != 1)) {
            fail_at(line_no, "gold value for '" + pid + "' must be 0 or 1");
          }
          gold.emplace(pid, v.get<int>() == 1);
        }
        set.gold = std::move(gold);
      }
      ds.queries.push_back({id, std::move(qtext)});
      ds.candidate_sets.push_back(std::move(set));
    } else {
      fail_at(line_no, "unknown record kind '" + kind + "'");
    }
  }
  if (ds.queries.empty()) throw InputError("dataset: no queries");
  ds.reindex();
  if (auto violations = validate(ds); !violations.empty()) {
    const auto& v = violations.front();
    throw InputError("dataset: " + v.entity + ": " + v.invariant);
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, Split split) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());
  try {
    return parse_dataset(in, split);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  for (const auto& p : dataset.passages) {
    json obj = {{"kind", "passage"}, {"id", p.id}, {"text", p.text}};
    out << obj.dump() << '\n';
  }
  for (std::size_t i = 0; i < dataset.queries.size(); ++i) {
    const auto& q = dataset.queries[i];
    const auto& set = dataset.candidate_sets[i];
    json obj = {{"kind", "query"}, {"id", q.id}, {"text", q.text},
                {"candidates", set.passage_ids}};
    if (set.gold) {
      json gold = json::object();
      for (const auto& [pid, rel] : *set.gold) gold[pid] = rel ? 1 : 0;
      obj["gold"] = std::move(gold);
    }
    out << obj.dump() << '\n';
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write dataset " + path.string());
  write_dataset(dataset, out);
}

}  // namespace wsrank
