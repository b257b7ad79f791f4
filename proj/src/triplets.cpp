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

#include "wsrank/triplets.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <unordered_map>

#include "wsrank/error.hpp"
#include "wsrank/format.hpp"
#include "wsrank/log.hpp"
#include "wsrank/rng.hpp"

namespace wsrank {

namespace {

struct QueryPool {
  std::string query_id;
  std::vector<std::size_t> positives;  // indices into the aggregated labels
  std::vector<std::size_t> negatives;
};

// Partial Fisher-Yates over [0, n) with the permutation stored sparsely.
std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t draws,
                                                      Rng& rng) {
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto value_at = [&](std::uint64_t i) {
    auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };
  std::vector<std::uint64_t> out;
  out.reserve(draws);
  for (std::uint64_t i = 0; i < draws; ++i) {
    const std::uint64_t j = i + rng.below(n - i);
    const std::uint64_t vi = value_at(i);
    const std::uint64_t vj = value_at(j);
    swapped[j] = vi;
    swapped[i] = vj;
    out.push_back(vj);
  }
  return out;
}

}  // namespace

TripletSet generate_triplets(const AggregatedLabels& labels, std::size_t per_query_samples,
                             std::uint64_t seed) {
  if (per_query_samples == 0) throw InputError("per_query_samples must be >= 1");
  std::vector<QueryPool> pools;
  std::unordered_map<std::string, std::size_t> pool_index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& qid = labels.pairs[i].query_id;
    auto [it, inserted] = pool_index.emplace(qid, pools.size());
    if (inserted) pools.push_back({qid, {}, {}});
    const auto& label = labels.labels[i];
    if (!label) continue;
    auto& pool = pools[it->second];
    (label->label == WeakLabel::kPositive ? pool.positives : pool.negatives).push_back(i);
  }

  TripletSet out;
  for (std::size_t q = 0; q < pools.size(); ++q) {
    const QueryPool& pool = pools[q];
    if (pool.positives.empty() || pool.negatives.empty()) {
      ++out.skipped_queries;
      continue;
    }
    const std::uint64_t space =
        static_cast<std::uint64_t>(pool.positives.size()) * pool.negatives.size();
    const std::uint64_t draws = std::min<std::uint64_t>(per_query_samples, space);
    Rng rng(derive_seed(seed, q));
    std::vector<std::uint64_t> picks;
    if (draws == space) {
      picks.resize(space);
      for (std::uint64_t i = 0; i < space; ++i) picks[i] = i;
    } else {
      picks = sample_without_replacement(space, draws, rng);
    }
    for (std::uint64_t pick : picks) {
      const std::size_t pi = pool.positives[pick / pool.negatives.size()];
      const std::size_t ni = pool.negatives[pick % pool.negatives.size()];
      const double s = std::sqrt(labels.labels[pi]->confidence * labels.labels[ni]->confidence);
      out.triplets.push_back({pool.query_id, labels.pairs[pi].passage_id,
                              labels.pairs[ni].passage_id, s});
    }
  }
  if (out.skipped_queries > 0) {
    log::warn(std::to_string(out.skipped_queries) +
              " queries lack a positive or a negative pair and yield no triplets");
  }
  return out;
}

void write_triplets(const std::vector<Triplet>& triplets, std::ostream& out,
                    const std::optional<Provenance>& provenance) {
  if (provenance) out << provenance_comment(*provenance) << '\n';
  out << "query_id\tpos_id\tneg_id\tconfidence\n";
  for (const auto& t : triplets) {
    out << t.query_id << '\t' << t.pos_id << '\t' << t.neg_id << '\t'
        << format_double(t.confidence) << '\n';
  }
}

std::vector<Triplet> read_triplets(std::istream& in) {
  std::vector<Triplet> triplets;
  std::string line;
  if (!next_data_line(in, line) || line != "query_id\tpos_id\tneg_id\tconfidence") {
    throw InputError("triplets: bad header");
  }
  std::size_t row = 0;
  while (next_data_line(in, line)) {
    ++row;
    auto f = split_fields(line, '\t');
    if (f.size() != 4) throw InputError("triplets row " + std::to_string(row) + ": expected 4 fields");
    const double s = parse_double(f[3]);
    if (!(s >= 0.0 && s <= 1.0)) {
      throw InputError("triplets row " + std::to_string(row) + ": confidence outside [0, 1]");
    }
    if (f[1] == f[2]) throw InputError("triplets row " + std::to_string(row) + ": pos == neg");
    triplets.push_back({std::move(f[0]), std::move(f[1]), std::move(f[2]), s});
  }
  return triplets;
}

std::vector<Triplet> load_triplets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open triplets " + path.string());
  return read_triplets(in);
}

}  // namespace wsrank
