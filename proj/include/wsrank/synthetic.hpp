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

// Synthetic benchmarks with planted relevance, used by the tests, the
// acceptance suite and the bundled CLI fixture.
//
// Each query has `candidates` passages of which `relevant_per_query` are
// relevant. Passage text shares query terms more often when relevant, so
// lexical scorers carry signal. Every planted function gets its own
// embedding store whose query/passage cosine is planted directly:
//
//   raw = signal * relevant + noise_sd * N(0, 1),  cosine = tanh(raw / 2)
//
// and, with probability flip_prob per query, the function's relevant and a
// random non-relevant passage swap their relevance signal.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wsrank/corpus.hpp"
#include "wsrank/embeddings.hpp"

namespace wsrank::synthetic {

struct PlantedFunction {
  std::string name;
  double flip_prob = 0.5;
  double noise_sd = 0.5;
};

struct Options {
  std::size_t train_queries = 200;
  std::size_t test_queries = 100;
  std::size_t candidates = 20;
  std::size_t relevant_per_query = 1;
  std::size_t embedding_dim = 8;
  double signal = 2.0;
  std::size_t vocabulary = 400;
  std::size_t query_terms = 4;
  double relevant_overlap = 0.6;      // chance each query term appears in a relevant passage
  double nonrelevant_overlap = 0.15;  // same for a non-relevant passage
  std::vector<PlantedFunction> functions;
  std::uint64_t seed = 1;
};

struct Benchmark {
  Dataset train;
  Dataset test;  // empty when test_queries == 0
  std::map<std::string, EmbeddingStore> stores;  // one per planted function
};

Benchmark make_benchmark(const Options& options);

/// Writes train.jsonl, test.jsonl (if any) and <function>.emb into `dir`.
void write_benchmark(const Benchmark& benchmark, const std::filesystem::path& dir);

/// Four functions tuned so each alone puts a relevant passage first for
/// roughly half of the queries.
std::vector<PlantedFunction> default_functions();

}  // namespace wsrank::synthetic
