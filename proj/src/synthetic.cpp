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

#include "wsrank/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wsrank/error.hpp"
#include "wsrank/rng.hpp"

namespace wsrank::synthetic {

namespace {

std::string pad(std::size_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
}

std::string term(std::size_t t) { return "t" + pad(t, 4); }

std::vector<double> random_unit(std::size_t dim, Rng& rng) {
  std::vector<double> v(dim);
  double norm = 0.0;
  while (norm < 1e-6) {
    for (double& x : v) x = rng.normal();
    norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  }
  for (double& x : v) x /= norm;
  return v;
}

// Unit vector whose cosine with unit vector `u` is c.
std::vector<float> with_cosine(const std::vector<double>& u, double c, Rng& rng) {
  std::vector<double> w;
  double norm = 0.0;
  while (norm < 1e-6) {
    w = random_unit(u.size(), rng);
    const double along = std::inner_product(w.begin(), w.end(), u.begin(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= along * u[i];
    norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
  }
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  std::vector<float> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = static_cast<float>(c * u[i] + s * w[i] / norm);
  return v;
}

void make_split(const Options& o, Split split, std::size_t n_queries, std::uint64_t stream,
                Dataset& ds, std::map<std::string, EmbeddingStore>& stores) {
  ds.split = split;
  const std::string prefix = std::string(split_name(split));
  Rng rng(derive_seed(o.seed, stream));
  for (std::size_t q = 0; q < n_queries; ++q) {
    const std::string qid = prefix + "-q" + pad(q, 4);
    std::vector<std::size_t> qterms;
    while (qterms.size() < o.query_terms) {
      const std::size_t t = rng.below(o.vocabulary);
      if (std::find(qterms.begin(), qterms.end(), t) == qterms.end()) qterms.push_back(t);
    }
    std::string qtext;
    for (std::size_t t : qterms) qtext += (qtext.empty() ? "" : " ") + term(t);
    ds.queries.push_back({qid, qtext + "?"});

    CandidateSet set;
    set.query_id = qid;
    std::map<std::string, bool> gold;
    std::vector<bool> relevant(o.candidates, false);
    for (std::size_t r = 0; r < std::min(o.relevant_per_query, o.candidates);) {
      const std::size_t i = rng.below(o.candidates);
      if (!relevant[i]) {
        relevant[i] = true;
        ++r;
      }
    }
    for (std::size_t c = 0; c < o.candidates; ++c) {
      const std::string pid = qid + "-p" + pad(c, 3);
      const double overlap = relevant[c] ? o.relevant_overlap : o.nonrelevant_overlap;
      std::vector<std::string> words;
      for (std::size_t t : qterms) {
        if (rng.bernoulli(overlap)) words.push_back(term(t));
      }
      const std::size_t filler = 6 + rng.below(10);
      for (std::size_t i = 0; i < filler; ++i) words.push_back(term(rng.below(o.vocabulary)));
      for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);
      std::string text;
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
      ds.passages.push_back({pid, text + "."});
      set.passage_ids.push_back(pid);
      gold.emplace(pid, relevant[c]);
    }
    set.gold = std::move(gold);

    for (const auto& fn : o.functions) {
      EmbeddingStore& store = stores.at(fn.name);
      std::vector<double> signal(o.candidates);
      for (std::size_t c = 0; c < o.candidates; ++c) signal[c] = relevant[c] ? o.signal : 0.0;
      if (rng.bernoulli(fn.flip_prob)) {
        std::vector<std::size_t> rel;
        std::vector<std::size_t> non;
        for (std::size_t c = 0; c < o.candidates; ++c) (relevant[c] ? rel : non).push_back(c);
        if (!rel.empty() && !non.empty()) {
          std::swap(signal[rel[rng.below(rel.size())]], signal[non[rng.below(non.size())]]);
        }
      }
      const auto u = random_unit(o.embedding_dim, rng);
      std::vector<float> uf(u.begin(), u.end());
      store.add(qid, uf);
      for (std::size_t c = 0; c < o.candidates; ++c) {
        const double raw = signal[c] + fn.noise_sd * rng.normal();
        store.add(set.passage_ids[c], with_cosine(u, std::tanh(raw / 2.0), rng));
      }
    }
    ds.candidate_sets.push_back(std::move(set));
  }
  ds.reindex();
}

}  // namespace

std::vector<PlantedFunction> default_functions() {
  return {{"universal", 0.45, 0.5}, {"bert", 0.55, 0.6}, {"lf_c", 0.5, 0.5}, {"lf_d", 0.5, 0.7}};
}

Benchmark make_benchmark(const Options& options) {
  if (options.candidates == 0 || options.train_queries == 0 || options.embedding_dim < 2) {
    throw InputError("synthetic benchmark needs queries, candidates and dim >= 2");
  }
  Benchmark b;
  for (const auto& fn : options.functions) {
    b.stores.emplace(fn.name, EmbeddingStore(options.embedding_dim, "synthetic:" + fn.name));
  }
  make_split(options, Split::kTrain, options.train_queries, 1, b.train, b.stores);
  if (options.test_queries > 0) {
    make_split(options, Split::kTest, options.test_queries, 2, b.test, b.stores);
  }
  return b;
}

void write_benchmark(const Benchmark& benchmark, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_dataset(benchmark.train, dir / "train.jsonl");
  if (!benchmark.test.queries.empty()) save_dataset(benchmark.test, dir / "test.jsonl");
  for (const auto& [name, store] : benchmark.stores) save_embeddings(store, dir / (name + ".emb"));
}

}  // namespace wsrank::synthetic
