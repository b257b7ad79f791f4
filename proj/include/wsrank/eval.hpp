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

// Ranking metrics (AP/MAP, RR/MRR, P@k) and pseudo-label quality
// (P@1, R@1, pooled AUC) against gold judgments.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wsrank/aggregation.hpp"
#include "wsrank/artifact.hpp"
#include "wsrank/corpus.hpp"
#include "wsrank/labeling.hpp"

namespace wsrank {

struct RankedList {
  std::string query_id;
  std::vector<std::string> passage_ids;  // best first
  std::vector<bool> relevant;            // parallel to passage_ids
};

/// Mean of precision at the rank of each relevant item; nullopt without any
/// relevant item (the query is then left out of MAP).
std::optional<double> average_precision(const RankedList& list);

/// 1 / rank of the first relevant item, 0 if none.
double reciprocal_rank(const RankedList& list);

/// Relevant items in the top min(k, n), divided by k.
double precision_at_k(const RankedList& list, std::size_t k);

/// Mann-Whitney AUC with average ranks for ties. Throws InputError unless
/// both classes are present.
double auc(std::span<const double> scores, std::span<const bool> gold);

struct QueryMetrics {
  std::string query_id;
  double average_precision = 0.0;
  double reciprocal_rank = 0.0;
  double p_at_1 = 0.0;
  double p_at_5 = 0.0;
};

struct MetricReport {
  double map = 0.0;
  double mrr = 0.0;
  double p_at_1 = 0.0;
  double p_at_5 = 0.0;
  std::size_t queries = 0;           // queries averaged
  std::size_t excluded_queries = 0;  // no relevant candidate
  std::vector<QueryMetrics> per_query;
};

/// Averages over lists that contain at least one relevant item.
MetricReport evaluate_rankings(std::span<const RankedList> lists);

/// Scores every candidate of `dataset` (which must carry gold) through
/// `scorer`, ranks descending with ties by ascending id, and evaluates.
using CandidateScorer =
    std::function<std::vector<double>(const CandidateSet& set)>;
MetricReport evaluate_ranker(const Dataset& dataset, const CandidateScorer& scorer);

/// Ranked list from scores, descending, ties by ascending passage id.
RankedList make_ranked_list(const CandidateSet& set, std::span<const double> scores);

struct LabelQuality {
  double p_at_1 = 0.0;
  double r_at_1 = 0.0;
  double auc = 0.0;
  std::size_t labeled_queries = 0;  // queries with at least one +1 pair
};

/// Quality of per-pair pseudo labels. `labels` and `scores` run parallel to
/// `pairs`; scores feed the AUC and default to the label values. Queries
/// without gold are skipped.
///   P@1 = mean over labeled queries of (relevant +1 pairs) / (+1 pairs)
///   R@1 = (relevant pairs labeled +1) / (relevant pairs)
LabelQuality pseudo_label_quality(std::span<const PairKey> pairs, std::span<const WeakLabel> labels,
                                  std::span<const double> scores, const Dataset& dataset);

/// One column of a label matrix.
LabelQuality pseudo_label_quality(const LabelMatrix& matrix, std::size_t column,
                                  const Dataset& dataset);

/// Aggregated labels; AUC uses the signed confidence (0 for abstain).
LabelQuality pseudo_label_quality(const AggregatedLabels& labels, const Dataset& dataset);

void write_report_table(const MetricReport& report, const std::string& title, std::ostream& out);

}  // namespace wsrank
