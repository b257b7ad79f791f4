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

#include "wsrank/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "wsrank/error.hpp"
#include "wsrank/format.hpp"
#include "wsrank/log.hpp"
#include "wsrank/parallel.hpp"

namespace wsrank {

WeakLabel weak_label_from_int(int v) {
  switch (v) {
    case -1:
      return WeakLabel::kNegative;
    case 0:
      return WeakLabel::kAbstain;
    case 1:
      return WeakLabel::kPositive;
    default:
      throw InputError("weak label must be -1, 0 or 1, got " + std::to_string(v));
  }
}

std::vector<WeakLabel> scores_to_labels(std::span<const ScoredPassage> scores,
                                        const LabelingOptions& options) {
  const std::size_t m = scores.size();
  std::vector<WeakLabel> labels(m, WeakLabel::kAbstain);
  if (m == 0) return labels;
  if (m == 1) {
    log::warn("query with a single candidate: labeled +1, it yields no triplets");
    labels[0] = WeakLabel::kPositive;
    return labels;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a].score != scores[b].score) return scores[a].score > scores[b].score;
    return scores[a].passage_id < scores[b].passage_id;
  });
  const std::size_t negatives = m / 2;
  for (std::size_t r = m - negatives; r < m; ++r) labels[order[r]] = WeakLabel::kNegative;
  labels[order[0]] = WeakLabel::kPositive;
  if (options.multi_positive_ties) {
    for (std::size_t r = 1; r < m - negatives; ++r) {
      if (scores[order[r]].score != scores[order[0]].score) break;
      labels[order[r]] = WeakLabel::kPositive;
    }
  }
  return labels;
}

const EmbeddingStore& ScoreResources::store(const std::string& name) const {
  auto it = stores.find(name);
  if (it == stores.end() || it->second == nullptr) {
    throw InputError("no embedding store named '" + name + "'");
  }
  return *it->second;
}

std::vector<double> score_candidates(const Dataset& dataset, const CandidateSet& set,
                                     const LabelingFunction& fn,
                                     const ScoreResources& resources) {
  std::vector<double> scores;
  scores.reserve(set.passage_ids.size());
  switch (fn.kind) {
    case ScoreKind::kBm25:
    case ScoreKind::kTfidf: {
      if (resources.stats == nullptr) {
        throw InputError("labeling function '" + fn.name + "' needs corpus statistics");
      }
      const Query* q = dataset.find_query(set.query_id);
      if (q == nullptr) throw InputError("unknown query '" + set.query_id + "'");
      const auto tokens = tokenize(q->text, resources.stats->tokenizer);
      for (const auto& pid : set.passage_ids) {
        scores.push_back(fn.kind == ScoreKind::kBm25
                             ? bm25_score(tokens, pid, *resources.stats, fn.bm25)
                             : tfidf_score(tokens, pid, *resources.stats));
      }
      break;
    }
    case ScoreKind::kEmbedding: {
      const EmbeddingStore& store = resources.store(fn.store);
      for (const auto& pid : set.passage_ids) {
        scores.push_back(pair_similarity(store, set.query_id, pid));
      }
      break;
    }
  }
  for (double s : scores) {
    if (!std::isfinite(s)) {
      throw NumericError("labeling function '" + fn.name + "' produced a non-finite score");
    }
  }
  return scores;
}

LabelMatrix LabelMatrix::select_columns(std::span<const std::size_t> columns) const {
  LabelMatrix out;
  out.pairs = pairs;
  out.query_offsets = query_offsets;
  for (std::size_t c : columns) out.functions.push_back(functions.at(c));
  out.labels.reserve(rows() * columns.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t c : columns) out.labels.push_back(at(i, c));
  }
  return out;
}

void LabelMatrix::rebuild_offsets() {
  query_offsets.clear();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 0 || pairs[i].query_id != pairs[i - 1].query_id) query_offsets.push_back(i);
  }
  query_offsets.push_back(pairs.size());
}

LabelMatrix apply_labeling_functions(const Dataset& dataset,
                                     std::span<const LabelingFunction> functions,
                                     const ScoreResources& resources,
                                     const ApplyOptions& options) {
  {
    std::vector<std::string> names;
    for (const auto& fn : functions) names.push_back(fn.name);
    std::sort(names.begin(), names.end());
    if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
      throw InputError("labeling function names must be unique");
    }
  }
  LabelMatrix matrix;
  const std::size_t k = functions.size();
  for (const auto& fn : functions) matrix.functions.push_back(fn.name);
  matrix.query_offsets.push_back(0);
  for (const auto& set : dataset.candidate_sets) {
    for (const auto& pid : set.passage_ids) matrix.pairs.push_back({set.query_id, pid});
    matrix.query_offsets.push_back(matrix.pairs.size());
  }
  matrix.labels.assign(matrix.pairs.size() * k, WeakLabel::kAbstain);

  parallel_for(dataset.candidate_sets.size(), options.threads, [&](std::size_t q) {
    const CandidateSet& set = dataset.candidate_sets[q];
    const std::size_t base = matrix.query_offsets[q];
    std::vector<ScoredPassage> scored(set.passage_ids.size());
    for (std::size_t j = 0; j < k; ++j) {
      const auto scores = score_candidates(dataset, set, functions[j], resources);
      for (std::size_t i = 0; i < scored.size(); ++i) scored[i] = {set.passage_ids[i], scores[i]};
      const auto labels = scores_to_labels(scored, options.labeling);
      for (std::size_t i = 0; i < labels.size(); ++i) matrix.labels[(base + i) * k + j] = labels[i];
    }
  });
  return matrix;
}

std::vector<std::string> check_label_histogram(const LabelMatrix& matrix) {
  std::vector<std::string> problems;
  for (std::size_t q = 0; q < matrix.query_count(); ++q) {
    const std::size_t begin = matrix.query_offsets[q];
    const std::size_t m = matrix.query_offsets[q + 1] - begin;
    if (m < 2) continue;
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      std::size_t pos = 0;
      std::size_t neg = 0;
      for (std::size_t i = begin; i < begin + m; ++i) {
        pos += matrix.at(i, j) == WeakLabel::kPositive;
        neg += matrix.at(i, j) == WeakLabel::kNegative;
      }
      if (pos != 1 || neg != m / 2) {
        problems.push_back("query " + matrix.pairs[begin].query_id + ", function " +
                           matrix.functions[j] + ": " + std::to_string(pos) + " positive, " +
                           std::to_string(neg) + " negative of " + std::to_string(m));
      }
    }
  }
  return problems;
}

void write_label_matrix(const LabelMatrix& matrix, std::ostream& out,
                        const std::optional<Provenance>& provenance) {
  if (provenance) out << provenance_comment(*provenance) << '\n';
  out << "query_id\tpassage_id";
  for (const auto& f : matrix.functions) out << '\t' << f;
  out << '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out << matrix.pairs[i].query_id << '\t' << matrix.pairs[i].passage_id;
    for (WeakLabel l : matrix.row(i)) out << '\t' << to_int(l);
    out << '\n';
  }
}

LabelMatrix read_label_matrix(std::istream& in) {
  LabelMatrix matrix;
  std::string line;
  if (!next_data_line(in, line)) throw InputError("label matrix: missing header");
  auto header = split_fields(line, '\t');
  if (header.size() < 2 || header[0] != "query_id" || header[1] != "passage_id") {
    throw InputError("label matrix: bad header");
  }
  matrix.functions.assign(header.begin() + 2, header.end());
  std::size_t row = 0;
  while (next_data_line(in, line)) {
    ++row;
    auto fields = split_fields(line, '\t');
    if (fields.size() != header.size()) {
      throw InputError("label matrix row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " fields");
    }
    matrix.pairs.push_back({fields[0], fields[1]});
    for (std::size_t j = 2; j < fields.size(); ++j) {
      matrix.labels.push_back(weak_label_from_int(parse_int(fields[j])));
    }
  }
  matrix.rebuild_offsets();
  return matrix;
}

LabelMatrix load_label_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open label matrix " + path.string());
  return read_label_matrix(in);
}

}  // namespace wsrank
