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

// (query, positive, negative) training instances drawn from aggregated
// pair labels. Confidence is the geometric mean of the two pair confidences.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wsrank/aggregation.hpp"
#include "wsrank/artifact.hpp"

namespace wsrank {

struct Triplet {
  std::string query_id;
  std::string pos_id;
  std::string neg_id;
  double confidence = 1.0;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletSet {
  std::vector<Triplet> triplets;  // grouped by query (first-appearance order), then draw order
  std::size_t skipped_queries = 0;  // queries lacking a positive or a negative
};

inline constexpr std::size_t kDefaultSamplesPerQuery = 4;

/// For each query with P positives and N negatives draws
/// min(per_query_samples, P*N) distinct pairs uniformly without replacement.
/// Abstained pairs are ignored. Deterministic in `seed`.
TripletSet generate_triplets(const AggregatedLabels& labels, std::size_t per_query_samples,
                             std::uint64_t seed);

void write_triplets(const std::vector<Triplet>& triplets, std::ostream& out,
                    const std::optional<Provenance>& provenance = std::nullopt);
std::vector<Triplet> read_triplets(std::istream& in);
std::vector<Triplet> load_triplets(const std::filesystem::path& path);

}  // namespace wsrank
