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

#include "wsrank/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "wsrank/error.hpp"

namespace wsrank {

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw NumericError("ICU NFKC normalizer unavailable");
  icu::UnicodeString input = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfkc->normalize(input, status);
  if (U_FAILURE(status)) throw InputError("text is not normalizable");
  if (config.lowercase) normalized.toLower(icu::Locale::getRoot());

  icu::UnicodeString current;
  std::size_t current_len = 0;
  auto flush = [&] {
    if (current_len >= config.min_token_len && current_len > 0) {
      std::string utf8;
      current.toUTF8String(utf8);
      if (!config.stopwords.contains(utf8)) tokens.push_back(std::move(utf8));
    }
    current.remove();
    current_len = 0;
  };

  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      flush();
      continue;
    }
    if (config.strip_punctuation && u_ispunct(c)) continue;
    current.append(c);
    ++current_len;
  }
  flush();
  return tokens;
}

TermCounts count_terms(std::span<const std::string> tokens) {
  std::map<std::string, int> counts;
  for (const auto& t : tokens) ++counts[t];
  return {counts.begin(), counts.end()};
}

int CorpusStats::df(const std::string& term) const {
  auto it = doc_freq.find(term);
  return it == doc_freq.end() ? 0 : it->second;
}

const TermCounts& CorpusStats::terms_of(const std::string& passage_id) const {
  auto it = doc_terms.find(passage_id);
  if (it == doc_terms.end()) throw InputError("unknown passage '" + passage_id + "'");
  return it->second;
}

CorpusStats build_stats(std::span<const Passage> passages, const TokenizerConfig& config) {
  if (passages.empty()) throw InputError("cannot build statistics over an empty pool");
  CorpusStats stats;
  stats.tokenizer = config;
  long long total_len = 0;
  for (const auto& p : passages) {
    if (stats.doc_terms.contains(p.id)) continue;
    const auto tokens = tokenize(p.text, config);
    TermCounts terms = count_terms(tokens);
    for (const auto& [term, count] : terms) ++stats.doc_freq[term];
    stats.doc_len[p.id] = static_cast<int>(tokens.size());
    total_len += static_cast<long long>(tokens.size());
    stats.doc_terms.emplace(p.id, std::move(terms));
  }
  stats.doc_count = stats.doc_terms.size();
  stats.avg_doc_len = static_cast<double>(total_len) / static_cast<double>(stats.doc_count);
  return stats;
}

CorpusStats build_stats(const Dataset& dataset, const TokenizerConfig& config) {
  std::vector<Passage> pool;
  std::set<std::string> seen;
  for (const auto& set : dataset.candidate_sets) {
    for (const auto& pid : set.passage_ids) {
      if (!seen.insert(pid).second) continue;
      const Passage* p = dataset.find_passage(pid);
      if (p == nullptr) throw InputError("unknown passage '" + pid + "'");
      pool.push_back(*p);
    }
  }
  return build_stats(pool, config);
}

void write_stats_json(const CorpusStats& stats, std::ostream& out) {
  nlohmann::ordered_json j;
  j["doc_count"] = stats.doc_count;
  j["avg_doc_len"] = stats.avg_doc_len;
  std::map<std::string, int> df(stats.doc_freq.begin(), stats.doc_freq.end());
  std::map<std::string, int> len(stats.doc_len.begin(), stats.doc_len.end());
  j["doc_freq"] = df;
  j["doc_len"] = len;
  out << j.dump(2) << '\n';
}

double idf(const CorpusStats& stats, const std::string& term) {
  const double n = static_cast<double>(stats.doc_count);
  const double df = static_cast<double>(stats.df(term));
  return std::log((n - df + 0.5) / (df + 0.5) + 1.0);
}

namespace {

int tf_of(const TermCounts& terms, const std::string& term) {
  auto it = std::lower_bound(terms.begin(), terms.end(), term,
                             [](const auto& entry, const std::string& t) { return entry.first < t; });
  return (it != terms.end() && it->first == term) ? it->second : 0;
}

double weighted_norm(const TermCounts& terms, const CorpusStats& stats) {
  double sq = 0.0;
  for (const auto& [term, count] : terms) {
    const double w = std::log1p(static_cast<double>(count)) * idf(stats, term);
    sq += w * w;
  }
  return std::sqrt(sq);
}

}  // namespace

double bm25_score(std::span<const std::string> query_tokens, const std::string& passage_id,
                  const CorpusStats& stats, Bm25Params params) {
  const TermCounts& doc = stats.terms_of(passage_id);
  const double len = static_cast<double>(stats.doc_len.at(passage_id));
  const double norm = params.k1 * (1.0 - params.b + params.b * len / stats.avg_doc_len);
  double score = 0.0;
  for (const auto& [term, qcount] : count_terms(query_tokens)) {
    const int tf = tf_of(doc, term);
    if (tf == 0) continue;
    const double f = static_cast<double>(tf);
    score += static_cast<double>(qcount) * idf(stats, term) * f * (params.k1 + 1.0) / (f + norm);
  }
  return score;
}

double tfidf_cosine(const TermCounts& a, const TermCounts& b, const CorpusStats& stats) {
  const double na = weighted_norm(a, stats);
  const double nb = weighted_norm(b, stats);
  if (na == 0.0 || nb == 0.0) return 0.0;
  double dot = 0.0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      const double w = idf(stats, ia->first);
      dot += (std::log1p(static_cast<double>(ia->second)) * w) *
             (std::log1p(static_cast<double>(ib->second)) * w);
      ++ia;
      ++ib;
    }
  }
  return std::clamp(dot / (na * nb), 0.0, 1.0);
}

double tfidf_score(std::span<const std::string> query_tokens, const std::string& passage_id,
                   const CorpusStats& stats) {
  return tfidf_cosine(count_terms(query_tokens), stats.terms_of(passage_id), stats);
}

}  // namespace wsrank
