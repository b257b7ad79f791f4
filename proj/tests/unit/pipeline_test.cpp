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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "wsrank/error.hpp"
#include "wsrank/pipeline.hpp"

namespace wsrank {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class Pipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("wsrank_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  PipelineConfig config(const std::string& name) const {
    PipelineConfig c = load_config(fs::path(WSRANK_FIXTURE_DIR) / "pipeline.toml");
    c.out_dir = root_ / name;
    return c;
  }

  fs::path root_;
};

const char* kAll[] = {artifacts::kLabels,     artifacts::kAggregated, artifacts::kParams,
                      artifacts::kFitTrace,   artifacts::kTriplets,   artifacts::kModel,
                      artifacts::kTrainTrace, artifacts::kRankings,   artifacts::kMetricsJson,
                      artifacts::kMetricsText};

TEST_F(Pipeline, StagesComposeToTheFullRun) {
  const PipelineConfig whole = config("whole");
  cmd_pipeline(whole);
  const PipelineConfig staged = config("staged");
  cmd_label(staged);
  cmd_aggregate(staged);
  cmd_triplets(staged);
  cmd_train(staged);
  cmd_rank(staged);
  cmd_eval(staged);
  for (const char* name : kAll) {
    ASSERT_TRUE(fs::exists(whole.out_dir / name)) << name;
    EXPECT_EQ(slurp(whole.out_dir / name), slurp(staged.out_dir / name)) << name;
  }
}

TEST_F(Pipeline, ArtifactsCarryProvenance) {
  const PipelineConfig c = config("prov");
  cmd_pipeline(c);
  const std::string stamp = "config_hash=" + c.hash() + " seed=7";
  for (const char* name : {artifacts::kLabels, artifacts::kAggregated, artifacts::kTriplets,
                           artifacts::kRankings, artifacts::kFitTrace, artifacts::kTrainTrace}) {
    const std::string text = slurp(c.out_dir / name);
    EXPECT_EQ(text.rfind("# wsrank stage=", 0), 0u) << name;
    EXPECT_NE(text.substr(0, text.find('\n')).find(stamp), std::string::npos) << name;
  }
  EXPECT_NE(slurp(c.out_dir / artifacts::kMetricsJson).find(c.hash()), std::string::npos);
}

TEST_F(Pipeline, ThreadCountDoesNotChangeArtifacts) {
  const PipelineConfig one = config("one");
  cmd_pipeline(one);
  PipelineConfig three = config("three");
  three.threads = 3;
  cmd_pipeline(three);
  for (const char* name : kAll) {
    EXPECT_EQ(slurp(one.out_dir / name), slurp(three.out_dir / name)) << name;
  }
}

TEST_F(Pipeline, MissingEmbeddingFailsBeforeAnyWork) {
  PipelineConfig c = config("missing");
  c.embeddings["bert"] = root_ / "nowhere.emb";
  try {
    cmd_pipeline(c);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("nowhere.emb"), std::string::npos) << e.what();
  }
  EXPECT_FALSE(fs::exists(c.out_dir / artifacts::kLabels));
}

TEST_F(Pipeline, LaterStageWithoutInputsNamesTheFile) {
  const PipelineConfig c = config("empty");
  try {
    cmd_triplets(c);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(artifacts::kAggregated), std::string::npos) << e.what();
  }
}

TEST_F(Pipeline, MajorityRunDropsStaleModelFiles) {
  PipelineConfig c = config("switch");
  cmd_label(c);
  cmd_aggregate(c);
  ASSERT_TRUE(fs::exists(c.out_dir / artifacts::kParams));
  c.method = AggregationMethod::kMajority;
  cmd_aggregate(c);
  EXPECT_FALSE(fs::exists(c.out_dir / artifacts::kParams));
  EXPECT_FALSE(fs::exists(c.out_dir / artifacts::kFitTrace));
}

}  // namespace
}  // namespace wsrank
