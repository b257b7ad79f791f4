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

// Writes synthetic datasets and EMB1 files.
//
//   wsrank_synth benchmark --out DIR [--train-queries N] [--test-queries N]
//                          [--candidates N] [--dim N] [--seed N] [--config]
//   wsrank_synth random-emb --dataset FILE --out FILE [--dim N] [--seed N]

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wsrank/corpus.hpp"
#include "wsrank/embeddings.hpp"
#include "wsrank/error.hpp"
#include "wsrank/rng.hpp"
#include "wsrank/synthetic.hpp"

namespace {

void write_fixture_config(const std::filesystem::path& dir, bool has_test) {
  std::ofstream out(dir / "pipeline.toml");
  out << "# Bundled synthetic fixture. Paths are relative to this file.\n"
         "[data]\n"
         "train = \"train.jsonl\"\n";
  if (has_test) out << "test = \"test.jsonl\"\n";
  out << "\n[embeddings]\n"
         "universal = \"universal.emb\"\n"
         "bert = \"bert.emb\"\n"
         "\n[labeling]\n"
         "functions = [\"bm25\", \"tfidf\", \"universal\", \"bert\"]\n"
         "\n[aggregation]\n"
         "method = \"generative\"\n"
         "gamma = 0.1\n"
         "\n[train]\n"
         "epochs = 20\n"
         "batch_size = 8\n"
         "learning_rate = 0.01\n"
         "feature_embedding = \"universal\"\n"
         "\n[run]\n"
         "seed = 7\n"
         "out_dir = \"out\"\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic fixtures for wsrank"};
  app.require_subcommand(1);

  wsrank::synthetic::Options opts;
  opts.functions = {{"universal", 0.35, 0.5}, {"bert", 0.45, 0.6}};
  std::filesystem::path bench_out;
  bool with_config = false;
  auto* bench = app.add_subcommand("benchmark", "planted-relevance dataset with embeddings");
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--train-queries", opts.train_queries);
  bench->add_option("--test-queries", opts.test_queries);
  bench->add_option("--candidates", opts.candidates);
  bench->add_option("--dim", opts.embedding_dim);
  bench->add_option("--seed", opts.seed);
  bench->add_flag("--config", with_config, "also write pipeline.toml");

  std::filesystem::path dataset_path;
  std::filesystem::path emb_out;
  std::size_t dim = 8;
  std::uint64_t seed = 1;
  auto* random = app.add_subcommand("random-emb", "random vectors for every id of a dataset");
  random->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  random->add_option("--out", emb_out)->required();
  random->add_option("--dim", dim);
  random->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      const auto b = wsrank::synthetic::make_benchmark(opts);
      wsrank::synthetic::write_benchmark(b, bench_out);
      if (with_config) write_fixture_config(bench_out, opts.test_queries > 0);
    } else {
      const auto ds = wsrank::load_dataset(dataset_path, wsrank::Split::kTrain);
      wsrank::EmbeddingStore store(dim, "random");
      wsrank::Rng rng(seed);
      std::vector<float> v(dim);
      auto add = [&](const std::string& id) {
        for (float& x : v) x = static_cast<float>(rng.normal());
        store.add(id, v);
      };
      for (const auto& q : ds.queries) add(q.id);
      for (const auto& p : ds.passages) add(p.id);
      wsrank::save_embeddings(store, emb_out);
    }
  } catch (const wsrank::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
