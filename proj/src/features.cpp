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

#include "wsrank/features.hpp"

#include <cmath>

#include "wsrank/error.hpp"
#include "wsrank/parallel.hpp"

namespace wsrank {

std::vector<std::string> FeatureSchema::feature_names() const {
  std::vector<std::string> names;
  for (const char* block : {"q", "p", "qp"}) {
    for (std::size_t i = 0; i < embedding_dim; ++i) {
      names.push_back(dense_store + "." + block + std::to_string(i));
    }
  }
  for (const auto& s : scalars) names.push_back(s.source.name);
  return names;
}

std::string FeatureTable::key(std::string_view q, std::string_view p) {
  std::string k(q);
  k.push_back('\t');
  k.append(p);
  return k;
}

void FeatureTable::add(const std::string& query_id, const std::string& passage_id,
                       std::span<const double> row) {
  if (row.size() != dim_) throw InputError("feature row has the wrong dimension");
  std::string k = key(query_id, passage_id);
  if (!index_.emplace(k, keys_.size()).second) {
    throw InputError("duplicate feature row for " + query_id + "/" + passage_id);
  }
  keys_.push_back(std::move(k));
  data_.insert(data_.end(), row.begin(), row.end());
}

bool FeatureTable::contains(std::string_view query_id, std::string_view passage_id) const {
  return index_.contains(key(query_id, passage_id));
}

std::span<const double> FeatureTable::at(std::string_view query_id,
                                         std::string_view passage_id) const {
  auto it = index_.find(key(query_id, passage_id));
  if (it == index_.end()) {
    throw InputError("no features for pair " + std::string(query_id) + "/" +
                     std::string(passage_id));
  }
  return row(it->second);
}

namespace {

// Writes the dense block; scalar slots are left for the caller.
void fill_dense(const FeatureSchema& schema, const ScoreResources& resources,
                std::string_view query_id, std::string_view passage_id, std::span<double> out) {
  if (schema.embedding_dim == 0) return;
  const EmbeddingStore& store = resources.store(schema.dense_store);
  if (store.dim() != schema.embedding_dim) {
    throw InputError("store '" + schema.dense_store + "' has dim " + std::to_string(store.dim()) +
                     ", model expects " + std::to_string(schema.embedding_dim));
  }
  const auto q = store.at(query_id);
  const auto p = store.at(passage_id);
  const std::size_t e = schema.embedding_dim;
  for (std::size_t i = 0; i < e; ++i) {
    const double qi = q[i];
    const double pi = p[i];
    out[i] = qi;
    out[e + i] = pi;
    out[2 * e + i] = qi * pi;
  }
}

double standardize(double raw, const ScalarFeature& f) { return (raw - f.mean) / f.stddev; }

// Raw (unstandardized) scalar scores: one row per candidate of `set`.
std::vector<std::vector<double>> raw_scalars(const Dataset& dataset, const CandidateSet& set,
                                             const FeatureSchema& schema,
                                             const ScoreResources& resources) {
  std::vector<std::vector<double>> per_source;
  per_source.reserve(schema.scalars.size());
  for (const auto& s : schema.scalars) {
    per_source.push_back(score_candidates(dataset, set, s.source, resources));
  }
  return per_source;
}

}  // namespace

FeatureSchema fit_feature_schema(const Dataset& train, const std::string& dense_store,
                                 std::span<const LabelingFunction> scalar_sources,
                                 const ScoreResources& resources, int threads) {
  FeatureSchema schema;
  schema.dense_store = dense_store;
  if (!dense_store.empty()) schema.embedding_dim = resources.store(dense_store).dim();
  if (resources.stats != nullptr) schema.tokenizer = resources.stats->tokenizer;
  for (const auto& src : scalar_sources) schema.scalars.push_back({src, 0.0, 1.0});

  const std::size_t nq = train.candidate_sets.size();
  std::vector<std::vector<std::vector<double>>> raw(nq);
  parallel_for(nq, threads, [&](std::size_t q) {
    raw[q] = raw_scalars(train, train.candidate_sets[q], schema, resources);
  });
  for (std::size_t s = 0; s < schema.scalars.size(); ++s) {
    double sum = 0.0;
    double count = 0.0;
    for (const auto& per_query : raw) {
      for (double v : per_query[s]) sum += v;
      count += static_cast<double>(per_query[s].size());
    }
    const double mean = count > 0.0 ? sum / count : 0.0;
    double sq = 0.0;
    for (const auto& per_query : raw) {
      for (double v : per_query[s]) sq += (v - mean) * (v - mean);
    }
    const double sd = count > 0.0 ? std::sqrt(sq / count) : 0.0;
    schema.scalars[s].mean = mean;
    schema.scalars[s].stddev = sd > 0.0 ? sd : 1.0;
  }
  return schema;
}

FeatureTable featurize_dataset(const Dataset& dataset, const FeatureSchema& schema,
                               const ScoreResources& resources, int threads) {
  const std::size_t nq = dataset.candidate_sets.size();
  const std::size_t d = schema.dim();
  const std::size_t e = schema.embedding_dim;
  std::vector<std::vector<double>> blocks(nq);
  parallel_for(nq, threads, [&](std::size_t q) {
    const CandidateSet& set = dataset.candidate_sets[q];
    const auto raw = raw_scalars(dataset, set, schema, resources);
    std::vector<double>& block = blocks[q];
    block.assign(set.passage_ids.size() * d, 0.0);
    for (std::size_t i = 0; i < set.passage_ids.size(); ++i) {
      std::span<double> row(block.data() + i * d, d);
      fill_dense(schema, resources, set.query_id, set.passage_ids[i], row);
      for (std::size_t s = 0; s < schema.scalars.size(); ++s) {
        row[3 * e + s] = standardize(raw[s][i], schema.scalars[s]);
      }
    }
  });
  FeatureTable table(d);
  for (std::size_t q = 0; q < nq; ++q) {
    const CandidateSet& set = dataset.candidate_sets[q];
    for (std::size_t i = 0; i < set.passage_ids.size(); ++i) {
      table.add(set.query_id, set.passage_ids[i],
                std::span<const double>(blocks[q].data() + i * d, d));
    }
  }
  return table;
}

std::vector<double> featurize(const Dataset& dataset, std::string_view query_id,
                              std::string_view passage_id, const FeatureSchema& schema,
                              const ScoreResources& resources) {
  const CandidateSet* set = dataset.find_candidates(query_id);
  if (set == nullptr) throw InputError("unknown query '" + std::string(query_id) + "'");
  CandidateSet single;
  single.query_id = set->query_id;
  single.passage_ids = {std::string(passage_id)};
  std::vector<double> row(schema.dim(), 0.0);
  fill_dense(schema, resources, query_id, passage_id, row);
  const auto raw = raw_scalars(dataset, single, schema, resources);
  for (std::size_t s = 0; s < schema.scalars.size(); ++s) {
    row[3 * schema.embedding_dim + s] = standardize(raw[s][0], schema.scalars[s]);
  }
  return row;
}

}  // namespace wsrank
