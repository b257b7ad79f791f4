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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wsrank/config.hpp"
#include "wsrank/error.hpp"
#include "wsrank/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wsrank: weakly supervised passage ranking"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out_dir;
  app.add_option("--config", config_path, "pipeline config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "master seed (overrides run.seed)");
  app.add_option("--threads", threads, "worker threads (overrides run.threads)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--out-dir", out_dir, "artifact directory (overrides run.out_dir)");

  using Stage = wsrank::StageOutputs (*)(const wsrank::PipelineConfig&);
  const std::pair<const char*, Stage> stages[] = {
      {"label", wsrank::cmd_label},         {"aggregate", wsrank::cmd_aggregate},
      {"triplets", wsrank::cmd_triplets},   {"train", wsrank::cmd_train},
      {"rank", wsrank::cmd_rank},           {"eval", wsrank::cmd_eval},
      {"pipeline", wsrank::cmd_pipeline},
  };
  const char* help[] = {
      "apply the labeling functions to the training split",
      "fuse weak labels (majority vote or generative model)",
      "sample training triplets from aggregated labels",
      "train the pair scorer",
      "rank the eval split with the trained scorer",
      "write ranking metrics and pseudo-label quality",
      "run every stage in order",
  };
  Stage chosen = nullptr;
  for (std::size_t i = 0; i < std::size(stages); ++i) {
    app.add_subcommand(stages[i].first, help[i])->callback([&chosen, stage = stages[i].second] {
      chosen = stage;
    });
  }
  bool reference = false;
  app.add_subcommand("config-reference", "print every config key with its default")
      ->callback([&reference] { reference = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidationError;
  }

  if (reference) {
    std::cout << wsrank::config_reference();
    return kOk;
  }

  try {
    if (config_path.empty()) throw wsrank::InputError("--config is required");
    wsrank::PipelineConfig config = wsrank::load_config(config_path);
    if (seed) config.seed = *seed;
    if (threads) config.threads = *threads;
    if (!out_dir.empty()) {
      config.out_dir = out_dir;
    } else {
      config.out_dir = config.resolve(config.out_dir);
    }
    for (const auto& path : chosen(config)) std::cout << path.string() << '\n';
    return kOk;
  } catch (const wsrank::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
