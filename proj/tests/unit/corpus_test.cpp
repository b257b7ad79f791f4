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

#include <sstream>

#include <gtest/gtest.h>

#include "support/datasets.hpp"
#include "wsrank/corpus.hpp"
#include "wsrank/error.hpp"

namespace wsrank {
namespace {

const char* kSmall =
    R"({"kind":"passage","id":"p1","text":"red fox"}
{"kind":"passage","id":"p2","text":"blue whale"}
{"kind":"query","id":"q1","text":"fox?","candidates":["p1","p2"],"gold":{"p1":1,"p2":0}}
{"kind":"query","id":"q2","text":"whale?","candidates":["p2"]}
)";

TEST(Corpus, ParsesQueriesPassagesAndGold) {
  const Dataset ds = testdata::parse(kSmall);
  ASSERT_EQ(ds.queries.size(), 2u);
  ASSERT_EQ(ds.passages.size(), 2u);
  EXPECT_EQ(ds.find_query("q1")->text, "fox?");
  EXPECT_EQ(ds.find_passage("p2")->text, "blue whale");
  const CandidateSet* set = ds.find_candidates("q1");
  ASSERT_NE(set, nullptr);
  EXPECT_TRUE(set->is_relevant("p1"));
  EXPECT_FALSE(set->is_relevant("p2"));
  EXPECT_FALSE(ds.find_candidates("q2")->gold.has_value());
  EXPECT_EQ(ds.pair_count(), 3u);
  EXPECT_TRUE(ds.has_gold());
  EXPECT_TRUE(validate(ds).empty());
}

TEST(Corpus, CandidateMissingFromGoldCountsAsNonRelevant) {
  const Dataset ds = testdata::parse(
      R"({"kind":"passage","id":"a","text":"x"}
{"kind":"passage","id":"b","text":"y"}
{"kind":"query","id":"q","text":"x","candidates":["a","b"],"gold":{"a":1}}
)");
  EXPECT_FALSE(ds.find_candidates("q")->is_relevant("b"));
}

TEST(Corpus, WriteThenParseRoundTrips) {
  const Dataset ds = testdata::parse(kSmall);
  std::ostringstream out;
  write_dataset(ds, out);
  const Dataset back = testdata::parse(out.str());
  EXPECT_TRUE(ds == back);
  std::ostringstream again;
  write_dataset(back, again);
  EXPECT_EQ(out.str(), again.str());
}

void expect_input_error(const std::string& jsonl, const std::string& fragment) {
  try {
    testdata::parse(jsonl);
    FAIL() << "expected InputError containing '" << fragment << "'";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Corpus, RejectsMalformedInput) {
  expect_input_error("", "no queries");
  expect_input_error("{not json}\n", "line 1");
  expect_input_error(R"({"kind":"query","id":"q","text":"","candidates":[]})", "empty text");
  expect_input_error(R"({"kind":"passage","id":"p","text":"a"}
{"kind":"passage","id":"p","text":"b"})",
                     "duplicate passage id");
  expect_input_error(R"({"kind":"query","id":"q","text":"t","candidates":["nope"]})",
                     "unknown passage");
  expect_input_error(R"({"kind":"passage","id":"p","text":"a"}
{"kind":"query","id":"q","text":"t","candidates":["p"],"gold":{"p":2}})",
                     "must be 0 or 1");
  expect_input_error(R"({"kind":"doc","id":"x","text":"a"})", "unknown record kind");
  expect_input_error(R"({"kind":"passage","id":"p","text":"a"}
{"kind":"query","id":"q","text":"t","candidates":["p","p"]})",
                     "duplicate candidate");
}

TEST(Corpus, ValidateListsEveryViolation) {
  Dataset ds = testdata::build({{"q", "text", {{"p", "x", true}}}});
  ds.candidate_sets[0].passage_ids.push_back("ghost");
  ds.candidate_sets[0].gold->emplace("other", true);
  const auto v = validate(ds);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].entity, "candidate q/ghost");
  EXPECT_EQ(v[1].entity, "gold q/other");
}

TEST(Corpus, SplitOverlapNamesSharedQueries) {
  const Dataset a = testdata::build({{"q1", "a", {{"p1", "x", {}}}}, {"q2", "b", {{"p2", "y", {}}}}});
  Dataset b = testdata::build({{"q2", "b", {{"p3", "z", {}}}}}, Split::kTest);
  const auto v = split_overlap(a, b);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].entity, "query q2");
  EXPECT_EQ(parse_split("val"), Split::kVal);
  EXPECT_THROW(parse_split("dev"), InputError);
}

}  // namespace
}  // namespace wsrank
