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

// Pipeline stages. Each stage reads its inputs from files in the output
// directory, writes its artifacts there, and stamps them with the config
// hash and seed:
//
//   label      -> labels.tsv
//   aggregate  -> aggregated.tsv (+ params.json, fit_trace.csv for the
//                 generative model)
//   triplets   -> triplets.tsv
//   train      -> model.ckpt, train_trace.csv
//   rank       -> rankings.tsv
//   eval       -> metrics.json, metrics.txt

#include <filesystem>
#include <string>
#include <vector>

#include "wsrank/config.hpp"

namespace wsrank {

namespace artifacts {
inline constexpr const char* kLabels = "labels.tsv";
inline constexpr const char* kAggregated = "aggregated.tsv";
inline constexpr const char* kParams = "params.json";
inline constexpr const char* kFitTrace = "fit_trace.csv";
inline constexpr const char* kTriplets = "triplets.tsv";
inline constexpr const char* kModel = "model.ckpt";
inline constexpr const char* kTrainTrace = "train_trace.csv";
inline constexpr const char* kRankings = "rankings.tsv";
inline constexpr const char* kMetricsJson = "metrics.json";
inline constexpr const char* kMetricsText = "metrics.txt";
}  // namespace artifacts

/// Paths written by a stage.
using StageOutputs = std::vector<std::filesystem::path>;

/// Throws InputError naming the first dataset or embedding file that is
/// missing. Every stage calls this before doing any work.
void check_config_inputs(const PipelineConfig& config);

StageOutputs cmd_label(const PipelineConfig& config);
StageOutputs cmd_aggregate(const PipelineConfig& config);
StageOutputs cmd_triplets(const PipelineConfig& config);
StageOutputs cmd_train(const PipelineConfig& config);
StageOutputs cmd_rank(const PipelineConfig& config);
StageOutputs cmd_eval(const PipelineConfig& config);

/// All stages in order.
StageOutputs cmd_pipeline(const PipelineConfig& config);

}  // namespace wsrank
