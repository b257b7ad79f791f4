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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "support/datasets.hpp"
#include "wsrank/error.hpp"
#include "wsrank/format.hpp"
#include "wsrank/lexical.hpp"
#include "wsrank/rng.hpp"

namespace wsrank {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, LowercasesAndStripsPunctuation) {
  EXPECT_EQ(tokenize("The cat, the hat", {}), (Tokens{"the", "cat", "the", "hat"}));
  EXPECT_TRUE(tokenize("", {}).empty());
  EXPECT_TRUE(tokenize(" \t\n ", {}).empty());
}

TEST(Tokenize, PunctuationInsideTokenIsDeleted) {
  TokenizerConfig c;
  c.min_token_len = 2;
  EXPECT_EQ(tokenize("A-1 b", c), (Tokens{"a1"}));
}

TEST(Tokenize, OptionsAreHonored) {
  TokenizerConfig c;
  c.lowercase = false;
  c.strip_punctuation = false;
  EXPECT_EQ(tokenize("Hi, There", c), (Tokens{"Hi,", "There"}));
  TokenizerConfig s;
  s.stopwords = {"the"};
  EXPECT_EQ(tokenize("The end", s), (Tokens{"end"}));
}

TEST(Tokenize, NormalizesCompatibilityForms) {
  // fullwidth letters and the "fi" ligature fold under NFKC
  EXPECT_EQ(tokenize("\xEF\xBC\xA1\xEF\xBC\xA2 \xEF\xAC\x81le", {}), (Tokens{"ab", "file"}));
  // no-break space separates tokens
  EXPECT_EQ(tokenize("x\xC2\xA0y", {}), (Tokens{"x", "y"}));
}

TEST(Tokenize, MatchesGoldenFile) {
  std::ifstream in(std::string(WSRANK_TEST_DATA) + "/tokenizer_golden.tsv");
  ASSERT_TRUE(in) << "missing golden file";
  std::string line;
  std::size_t cases = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line, '\t');
    ASSERT_EQ(fields.size(), 3u) << line;
    TokenizerConfig c;
    c.min_token_len = static_cast<std::size_t>(parse_int(fields[0]));
    std::string joined;
    for (const auto& t : tokenize(fields[1], c)) joined += (joined.empty() ? "" : " ") + t;
    EXPECT_EQ(joined, fields[2]) << "input: " << fields[1];
    ++cases;
  }
  EXPECT_GE(cases, 5u);
}

TEST(Tokenize, OutputSatisfiesConfig) {
  Rng rng(4);
  const char* pieces[] = {"Ab", "c,d", "E.", "ü", "ß", "--", "x1", "ÉCOLE", "'q'", " ", "\t"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    for (int i = 0; i < 8; ++i) text += pieces[rng.below(std::size(pieces))];
    TokenizerConfig c;
    c.min_token_len = 1 + rng.below(3);
    const Tokens a = tokenize(text, c);
    EXPECT_EQ(a, tokenize(text, c));
    for (const auto& t : a) {
      EXPECT_FALSE(t.empty());
      EXPECT_EQ(t.find_first_of(" \t,.'-"), std::string::npos) << t;
      EXPECT_EQ(std::count_if(t.begin(), t.end(), [](char ch) { return ch >= 'A' && ch <= 'Z'; }), 0);
    }
  }
}

std::vector<Passage> toy_corpus() {
  return {{"d1", "a b c"}, {"d2", "a a d"}, {"d3", "b e"}};
}

TEST(CorpusStats, TwoDocExample) {
  const std::vector<Passage> docs{{"x", "a b"}, {"y", "a"}};
  const CorpusStats s = build_stats(docs, {});
  EXPECT_EQ(s.doc_count, 2u);
  EXPECT_EQ(s.df("a"), 2);
  EXPECT_EQ(s.df("b"), 1);
  EXPECT_EQ(s.df("zzz"), 0);
  EXPECT_DOUBLE_EQ(s.avg_doc_len, 1.5);
}

TEST(CorpusStats, ToyCorpusTable) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  EXPECT_EQ(s.doc_count, 3u);
  EXPECT_DOUBLE_EQ(s.avg_doc_len, 8.0 / 3.0);
  const std::map<std::string, int> df{{"a", 2}, {"b", 2}, {"c", 1}, {"d", 1}, {"e", 1}};
  EXPECT_EQ(s.doc_freq.size(), df.size());
  for (const auto& [t, n] : df) EXPECT_EQ(s.df(t), n) << t;
  EXPECT_EQ(s.doc_len.at("d2"), 3);
  EXPECT_EQ(s.doc_len.at("d3"), 2);
  EXPECT_EQ(s.terms_of("d2"), (TermCounts{{"a", 2}, {"d", 1}}));
  EXPECT_THROW(s.terms_of("nope"), InputError);
}

TEST(CorpusStats, IdenticalDocsHaveDfEqualToN) {
  const std::vector<Passage> docs{{"x", "k l"}, {"y", "k l"}, {"z", "l k"}};
  const CorpusStats s = build_stats(docs, {});
  EXPECT_EQ(s.df("k"), 3);
  EXPECT_EQ(s.df("l"), 3);
}

TEST(CorpusStats, IndependentOfPassageOrder) {
  auto docs = toy_corpus();
  const CorpusStats a = build_stats(docs, {});
  std::reverse(docs.begin(), docs.end());
  const CorpusStats b = build_stats(docs, {});
  EXPECT_EQ(a.doc_freq, b.doc_freq);
  EXPECT_EQ(a.avg_doc_len, b.avg_doc_len);
  std::ostringstream ja;
  std::ostringstream jb;
  write_stats_json(a, ja);
  write_stats_json(b, jb);
  EXPECT_EQ(ja.str(), jb.str());
}

TEST(CorpusStats, EmptyPoolIsAnError) {
  EXPECT_THROW(build_stats(std::vector<Passage>{}, {}), InputError);
}

TEST(Bm25, SingleDocQueryEqualsDoc) {
  const std::vector<Passage> docs{{"d", "a b a"}};
  const CorpusStats s = build_stats(docs, {});
  const Tokens q{"a", "b", "a"};
  // 3.75 * ln(4/3): tf(a)=2 twice in the query, tf(b)=1, len = avg
  EXPECT_NEAR(bm25_score(q, "d", s), 1.0788077716941782, 1e-14);
}

TEST(Bm25, ToyCorpusValues) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  const Tokens q{"a", "b"};
  EXPECT_NEAR(bm25_score(q, "d1", s), 0.8942771756459402, 1e-14);
  EXPECT_NEAR(bm25_score(q, "d2", s), 0.6243067075264112, 1e-14);
  EXPECT_NEAR(bm25_score(q, "d3", s), 0.5235483465015789, 1e-14);
  EXPECT_NEAR(idf(s, "c"), std::log(8.0 / 3.0), 1e-15);
}

TEST(Bm25, NoOverlapScoresZeroAndUnknownPassageThrows) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  EXPECT_EQ(bm25_score(Tokens{"zzz"}, "d1", s), 0.0);
  EXPECT_THROW(bm25_score(Tokens{"a"}, "nope", s), InputError);
}

TEST(Bm25, MoreOccurrencesRaiseScoreSublinearly) {
  const std::vector<Passage> docs{{"one", "t x x x"}, {"two", "t t x x"}, {"four", "t t t t"},
                                  {"other", "y y y y"}};
  const CorpusStats s = build_stats(docs, {});
  const Tokens q{"t"};
  const double s1 = bm25_score(q, "one", s);
  const double s2 = bm25_score(q, "two", s);
  const double s4 = bm25_score(q, "four", s);
  EXPECT_GT(s2, s1);
  EXPECT_GT(s4, s2);
  EXPECT_LT(s2, 2.0 * s1);
}

TEST(Bm25, QueryOrderDoesNotMatter) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  Rng rng(5);
  Tokens q{"a", "b", "a", "e", "c", "zz"};
  const double ref = bm25_score(q, "d1", s);
  const double ref_t = tfidf_score(q, "d2", s);
  for (int i = 0; i < 50; ++i) {
    for (std::size_t j = q.size(); j > 1; --j) std::swap(q[j - 1], q[rng.below(j)]);
    EXPECT_EQ(bm25_score(q, "d1", s), ref);
    EXPECT_EQ(tfidf_score(q, "d2", s), ref_t);
  }
}

TEST(Bm25, FrozenStatsIgnoreUnrelatedPassages) {
  auto docs = toy_corpus();
  const CorpusStats s = build_stats(docs, {});
  const Tokens q{"a", "b"};
  const double before = bm25_score(q, "d1", s);
  docs.push_back({"d4", "unrelated words"});
  const CorpusStats grown = build_stats(docs, {});
  // only N and avg_doc_len moved; the frozen table still scores identically
  EXPECT_EQ(bm25_score(q, "d1", s), before);
  EXPECT_NE(bm25_score(q, "d1", grown), before);
}

TEST(Tfidf, ToyCorpusValues) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  const Tokens q{"a", "b"};
  EXPECT_NEAR(tfidf_score(q, "d1", s), 0.5609943785541048, 1e-14);
  EXPECT_NEAR(tfidf_score(q, "d2", s), 0.42767937519903015, 1e-14);
}

TEST(Tfidf, RangeAndDegenerateCases) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  EXPECT_EQ(tfidf_score(Tokens{"zzz"}, "d1", s), 0.0);
  EXPECT_EQ(tfidf_score(Tokens{}, "d1", s), 0.0);
  EXPECT_EQ(tfidf_score(Tokens{"a", "b", "c"}, "d1", s), 1.0);
  EXPECT_THROW(tfidf_score(Tokens{"a"}, "nope", s), InputError);
}

TEST(Tfidf, CosineIsSymmetric) {
  const CorpusStats s = build_stats(toy_corpus(), {});
  Rng rng(6);
  const char* vocab[] = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 100; ++i) {
    Tokens x;
    Tokens y;
    for (int j = 0; j < 5; ++j) x.push_back(vocab[rng.below(6)]);
    for (int j = 0; j < 4; ++j) y.push_back(vocab[rng.below(6)]);
    const double xy = tfidf_cosine(count_terms(x), count_terms(y), s);
    EXPECT_EQ(xy, tfidf_cosine(count_terms(y), count_terms(x), s));
    EXPECT_GE(xy, 0.0);
    EXPECT_LE(xy, 1.0);
  }
}

TEST(CorpusStats, DatasetPoolCoversCandidates) {
  const Dataset ds = testdata::build({{"q1", "a", {{"p1", "a b", {}}, {"p2", "c", {}}}},
                                      {"q2", "b", {{"p3", "b b", {}}}}});
  const CorpusStats s = build_stats(ds, {});
  EXPECT_EQ(s.doc_count, 3u);
  EXPECT_EQ(s.df("b"), 2);
}

}  // namespace
}  // namespace wsrank
