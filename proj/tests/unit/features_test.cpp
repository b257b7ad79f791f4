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

#include <gtest/gtest.h>

#include "support/datasets.hpp"
#include "wsrank/error.hpp"
#include "wsrank/features.hpp"
#include "wsrank/rng.hpp"

namespace wsrank {
namespace {

struct Fixture {
  Dataset ds = testdata::build({{"q", "a b", {{"p1", "a", {}}, {"p2", "b c", {}}}}});
  EmbeddingStore store{2, "emb"};
  ScoreResources res;

  Fixture() {
    store.add("q", std::vector<float>{1, 2});
    store.add("p1", std::vector<float>{3, -1});
    store.add("p2", std::vector<float>{0.5f, 0.25f});
    res.stores.emplace("emb", &store);
  }
};

LabelingFunction cosine_source() {
  LabelingFunction f;
  f.name = "emb";
  f.kind = ScoreKind::kEmbedding;
  f.store = "emb";
  return f;
}

TEST(Features, GoldenRow) {
  Fixture fx;
  FeatureSchema schema;
  schema.dense_store = "emb";
  schema.embedding_dim = 2;
  schema.scalars.push_back({cosine_source(), 0.5, 2.0});
  ASSERT_EQ(schema.dim(), 7u);
  const auto row = featurize(fx.ds, "q", "p1", schema, fx.res);
  const std::vector<double> head{1, 2, 3, -1, 3, -2};
  for (std::size_t i = 0; i < head.size(); ++i) EXPECT_EQ(row[i], head[i]) << i;
  EXPECT_NEAR(row[6], (1.0 / std::sqrt(50.0) - 0.5) / 2.0, 1e-15);
  EXPECT_EQ(schema.feature_names(),
            (std::vector<std::string>{"emb.q0", "emb.q1", "emb.p0", "emb.p1", "emb.qp0", "emb.qp1", "emb"}));
}

TEST(Features, IdenticalVectorsGiveSquaresInProductBlock) {
  EmbeddingStore store(3, "s");
  store.add("q", std::vector<float>{1.5f, -2, 0.25f});
  store.add("p", std::vector<float>{1.5f, -2, 0.25f});
  ScoreResources res;
  res.stores.emplace("s", &store);
  const Dataset ds = testdata::build({{"q", "x", {{"p", "x", {}}}}});
  FeatureSchema schema;
  schema.dense_store = "s";
  schema.embedding_dim = 3;
  const auto row = featurize(ds, "q", "p", schema, res);
  EXPECT_EQ(std::vector<double>(row.begin() + 6, row.end()), (std::vector<double>{2.25, 4, 0.0625}));
}

TEST(Features, StandardizationUsesPopulationMoments) {
  Fixture fx;
  const std::vector<LabelingFunction> src{cosine_source()};
  const FeatureSchema schema = fit_feature_schema(fx.ds, "emb", src, fx.res);
  const double c1 = 1.0 / std::sqrt(50.0);
  const double cos2 = 0.8;  // (1,2).(0.5,0.25) / (sqrt(5) * sqrt(0.3125))
  const double mean = (c1 + cos2) / 2;
  EXPECT_NEAR(schema.scalars[0].mean, mean, 1e-15);
  EXPECT_NEAR(schema.scalars[0].stddev, std::abs(c1 - cos2) / 2, 1e-15);
  const FeatureTable table = featurize_dataset(fx.ds, schema, fx.res);
  EXPECT_NEAR(table.at("q", "p1")[6], -1.0, 1e-12);
  EXPECT_NEAR(table.at("q", "p2")[6], 1.0, 1e-12);
}

TEST(Features, ConstantSourceKeepsUnitDeviation) {
  const Dataset ds = testdata::build({{"q", "zz", {{"p1", "a", {}}, {"p2", "b", {}}}}});
  const CorpusStats stats = build_stats(ds, {});
  ScoreResources res;
  res.stats = &stats;
  LabelingFunction bm25;
  bm25.name = "bm25";
  const std::vector<LabelingFunction> src{bm25};
  const FeatureSchema schema = fit_feature_schema(ds, "", src, res);
  EXPECT_EQ(schema.scalars[0].mean, 0.0);
  EXPECT_EQ(schema.scalars[0].stddev, 1.0);
  EXPECT_EQ(schema.dim(), 1u);
}

TEST(Features, TableMatchesSinglePairAndIsThreadInvariant) {
  Rng rng(41);
  std::vector<testdata::Q> qs;
  EmbeddingStore store(4, "s");
  for (int q = 0; q < 7; ++q) {
    testdata::Q query{"q" + std::to_string(q), "t" + std::to_string(q % 3) + " common", {}};
    std::vector<float> v(4);
    for (auto& x : v) x = static_cast<float>(rng.normal());
    store.add(query.id, v);
    for (int p = 0; p < 5; ++p) {
      const std::string id = query.id + "p" + std::to_string(p);
      query.docs.push_back({id, "t" + std::to_string(rng.below(3)) + " w" + std::to_string(p), {}});
      for (auto& x : v) x = static_cast<float>(rng.normal());
      store.add(id, v);
    }
    qs.push_back(query);
  }
  const Dataset ds = testdata::build(qs);
  const CorpusStats stats = build_stats(ds, {});
  ScoreResources res;
  res.stats = &stats;
  res.stores.emplace("s", &store);
  LabelingFunction bm25;
  bm25.name = "bm25";
  LabelingFunction tfidf;
  tfidf.name = "tfidf";
  tfidf.kind = ScoreKind::kTfidf;
  const std::vector<LabelingFunction> src{bm25, tfidf};
  const FeatureSchema schema = fit_feature_schema(ds, "s", src, res, 1);
  const FeatureSchema schema3 = fit_feature_schema(ds, "s", src, res, 3);
  EXPECT_EQ(schema.scalars[1].mean, schema3.scalars[1].mean);
  const FeatureTable a = featurize_dataset(ds, schema, res, 1);
  const FeatureTable b = featurize_dataset(ds, schema, res, 3);
  ASSERT_EQ(a.size(), 35u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    EXPECT_TRUE(std::equal(ra.begin(), ra.end(), rb.begin()));
  }
  const auto single = featurize(ds, "q3", "q3p2", schema, res);
  const auto from_table = a.at("q3", "q3p2");
  EXPECT_TRUE(std::equal(single.begin(), single.end(), from_table.begin()));
}

TEST(Features, MissingPairsAndVectorsAreErrors) {
  Fixture fx;
  FeatureTable t(2);
  t.add("q", "p", std::vector<double>{1, 2});
  EXPECT_THROW(t.add("q", "p", std::vector<double>{1, 2}), InputError);
  EXPECT_THROW(t.add("q", "r", std::vector<double>{1}), InputError);
  EXPECT_THROW(t.at("q", "zz"), InputError);
  FeatureSchema schema;
  schema.dense_store = "emb";
  schema.embedding_dim = 3;
  EXPECT_THROW(featurize(fx.ds, "q", "p1", schema, fx.res), InputError);
  schema.embedding_dim = 2;
  EXPECT_THROW(featurize(fx.ds, "nope", "p1", schema, fx.res), InputError);
}

}  // namespace
}  // namespace wsrank
