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

// Tokenization, pool statistics, and the two lexical score sources (Okapi
// BM25 and ln(1+tf)*idf cosine).

#include <cstddef>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wsrank/corpus.hpp"

namespace wsrank {

struct TokenizerConfig {
  bool lowercase = true;
  bool strip_punctuation = true;  // delete punctuation code points inside tokens
  std::size_t min_token_len = 1;  // in code points
  std::set<std::string> stopwords;
};

/// NFKC-normalize, optionally lowercase, split on Unicode whitespace, then
/// apply the punctuation and length filters. Deterministic; "" -> {}.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config);

/// Sorted (term, count) pairs.
using TermCounts = std::vector<std::pair<std::string, int>>;

TermCounts count_terms(std::span<const std::string> tokens);

struct CorpusStats {
  TokenizerConfig tokenizer;
  std::size_t doc_count = 0;
  double avg_doc_len = 0.0;
  std::unordered_map<std::string, int> doc_freq;
  std::unordered_map<std::string, int> doc_len;
  std::unordered_map<std::string, TermCounts> doc_terms;

  int df(const std::string& term) const;
  const TermCounts& terms_of(const std::string& passage_id) const;  // throws InputError
};

/// Statistics over a passage pool. Throws InputError on an empty pool.
CorpusStats build_stats(std::span<const Passage> passages, const TokenizerConfig& config);

/// Pool of every candidate passage in the dataset.
CorpusStats build_stats(const Dataset& dataset, const TokenizerConfig& config);

void write_stats_json(const CorpusStats& stats, std::ostream& out);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

/// ln((N - df + 0.5) / (df + 0.5) + 1); strictly positive.
double idf(const CorpusStats& stats, const std::string& term);

double bm25_score(std::span<const std::string> query_tokens, const std::string& passage_id,
                  const CorpusStats& stats, Bm25Params params = {});

/// Cosine of ln(1+tf)*idf vectors, in [0, 1]; zero vectors give 0.
double tfidf_score(std::span<const std::string> query_tokens, const std::string& passage_id,
                   const CorpusStats& stats);

/// Same weighting applied to two arbitrary token multisets. Symmetric.
double tfidf_cosine(const TermCounts& a, const TermCounts& b, const CorpusStats& stats);

}  // namespace wsrank
