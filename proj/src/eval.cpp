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

#include "wsrank/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "wsrank/error.hpp"

namespace wsrank {

std::optional<double> average_precision(const RankedList& list) {
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < list.relevant.size(); ++i) {
    if (!list.relevant[i]) continue;
    hits += 1.0;
    sum += hits / static_cast<double>(i + 1);
  }
  if (hits == 0.0) return std::nullopt;
  return sum / hits;
}

double reciprocal_rank(const RankedList& list) {
  for (std::size_t i = 0; i < list.relevant.size(); ++i) {
    if (list.relevant[i]) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

double precision_at_k(const RankedList& list, std::size_t k) {
  if (k == 0) throw InputError("precision_at_k needs k >= 1");
  const std::size_t top = std::min(k, list.relevant.size());
  const auto hits = std::count(list.relevant.begin(), list.relevant.begin() + top, true);
  return static_cast<double>(hits) / static_cast<double>(k);
}

double auc(std::span<const double> scores, std::span<const bool> gold) {
  if (scores.size() != gold.size()) throw InputError("auc: scores and gold differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  double positives = 0.0;
  double pos_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    // ranks i+1 .. j share their mean
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) {
      if (gold[order[t]]) {
        positives += 1.0;
        pos_rank_sum += mean_rank;
      }
    }
    i = j;
  }
  const double negatives = static_cast<double>(n) - positives;
  if (positives == 0.0 || negatives == 0.0) {
    throw InputError("auc needs at least one positive and one negative gold pair");
  }
  return (pos_rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

MetricReport evaluate_rankings(std::span<const RankedList> lists) {
  MetricReport report;
  for (const auto& list : lists) {
    const auto ap = average_precision(list);
    if (!ap) {
      ++report.excluded_queries;
      continue;
    }
    QueryMetrics m{list.query_id, *ap, reciprocal_rank(list), precision_at_k(list, 1),
                   precision_at_k(list, 5)};
    report.map += m.average_precision;
    report.mrr += m.reciprocal_rank;
    report.p_at_1 += m.p_at_1;
    report.p_at_5 += m.p_at_5;
    report.per_query.push_back(std::move(m));
  }
  report.queries = report.per_query.size();
  if (report.queries > 0) {
    const double n = static_cast<double>(report.queries);
    report.map /= n;
    report.mrr /= n;
    report.p_at_1 /= n;
    report.p_at_5 /= n;
  }
  return report;
}

RankedList make_ranked_list(const CandidateSet& set, std::span<const double> scores) {
  if (scores.size() != set.passage_ids.size()) {
    throw InputError("query " + set.query_id + ": expected one score per candidate");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return set.passage_ids[a] < set.passage_ids[b];
  });
  RankedList list;
  list.query_id = set.query_id;
  for (std::size_t i : order) {
    list.passage_ids.push_back(set.passage_ids[i]);
    list.relevant.push_back(set.is_relevant(set.passage_ids[i]));
  }
  return list;
}

MetricReport evaluate_ranker(const Dataset& dataset, const CandidateScorer& scorer) {
  if (!dataset.has_gold()) throw InputError("evaluation needs gold labels");
  std::vector<RankedList> lists;
  for (const auto& set : dataset.candidate_sets) {
    if (!set.gold) continue;
    const auto scores = scorer(set);
    lists.push_back(make_ranked_list(set, scores));
  }
  return evaluate_rankings(lists);
}

LabelQuality pseudo_label_quality(std::span<const PairKey> pairs, std::span<const WeakLabel> labels,
                                  std::span<const double> scores, const Dataset& dataset) {
  if (labels.size() != pairs.size() || (!scores.empty() && scores.size() != pairs.size())) {
    throw InputError("pseudo_label_quality: inputs differ in length");
  }
  if (!dataset.has_gold()) throw InputError("pseudo-label quality needs gold labels");

  struct PerQuery {
    double positives = 0.0;
    double hits = 0.0;
  };
  std::map<std::string, PerQuery> per_query;
  double relevant_total = 0.0;
  double relevant_hit = 0.0;
  std::vector<double> auc_scores;
  auto auc_gold = std::make_unique<bool[]>(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const CandidateSet* set = dataset.find_candidates(pairs[i].query_id);
    if (set == nullptr) throw InputError("unknown query '" + pairs[i].query_id + "'");
    if (!set->gold) continue;
    const bool rel = set->is_relevant(pairs[i].passage_id);
    const bool positive = labels[i] == WeakLabel::kPositive;
    relevant_total += rel;
    if (positive) {
      auto& q = per_query[pairs[i].query_id];
      q.positives += 1.0;
      q.hits += rel;
      relevant_hit += rel;
    }
    auc_scores.push_back(scores.empty() ? static_cast<double>(to_int(labels[i])) : scores[i]);
    auc_gold[auc_scores.size() - 1] = rel;
  }
  LabelQuality out;
  for (const auto& [qid, q] : per_query) out.p_at_1 += q.hits / q.positives;
  out.labeled_queries = per_query.size();
  if (out.labeled_queries > 0) out.p_at_1 /= static_cast<double>(out.labeled_queries);
  out.r_at_1 = relevant_total > 0.0 ? relevant_hit / relevant_total : 0.0;
  out.auc = auc(auc_scores, std::span<const bool>(auc_gold.get(), auc_scores.size()));
  return out;
}

LabelQuality pseudo_label_quality(const LabelMatrix& matrix, std::size_t column,
                                  const Dataset& dataset) {
  if (column >= matrix.cols()) throw InputError("label matrix has no such column");
  std::vector<WeakLabel> labels(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i) labels[i] = matrix.at(i, column);
  return pseudo_label_quality(matrix.pairs, labels, {}, dataset);
}

LabelQuality pseudo_label_quality(const AggregatedLabels& labels, const Dataset& dataset) {
  std::vector<WeakLabel> values(labels.size(), WeakLabel::kAbstain);
  std::vector<double> scores(labels.size(), 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (const auto& l = labels.labels[i]) {
      values[i] = l->label;
      scores[i] = static_cast<double>(to_int(l->label)) * l->confidence;
    }
  }
  return pseudo_label_quality(labels.pairs, values, scores, dataset);
}

void write_report_table(const MetricReport& report, const std::string& title, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %8s %8s %8s %8s %8s\n", "method", "MAP", "MRR", "P@1",
                "P@5", "queries");
  out << line;
  std::snprintf(line, sizeof line, "%-24s %8.2f %8.2f %8.2f %8.2f %8zu\n", title.c_str(),
                100.0 * report.map, 100.0 * report.mrr, 100.0 * report.p_at_1,
                100.0 * report.p_at_5, report.queries);
  out << line;
}

}  // namespace wsrank
