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

// Dense vectors produced outside the process, stored in the EMB1 format:
//
//   "EMB1" | u32 count | u32 dim | count x (u16 id_len | id bytes | dim x f32)
//
// All integers and floats little-endian.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wsrank {

class EmbeddingStore {
 public:
  EmbeddingStore() = default;
  EmbeddingStore(std::size_t dim, std::string provenance);

  /// Throws InputError on wrong length, non-finite component, or duplicate id.
  void add(std::string id, std::span<const float> vector);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::string& provenance() const { return provenance_; }
  const std::vector<std::string>& ids() const { return ids_; }

  bool contains(std::string_view id) const;
  std::span<const float> at(std::string_view id) const;  // throws InputError
  std::span<const float> row(std::size_t i) const;

  friend bool operator==(const EmbeddingStore& a, const EmbeddingStore& b);

 private:
  std::size_t dim_ = 0;
  std::string provenance_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingStore read_embeddings(std::istream& in, std::string provenance);
/// Provenance defaults to the file stem.
EmbeddingStore load_embeddings(const std::filesystem::path& path, std::string provenance = {});

void write_embeddings(const EmbeddingStore& store, std::ostream& out);
void save_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

/// Cosine with f64 accumulation, clamped to [-1, 1]. A zero vector yields 0
/// and a warning.
double cosine(std::span<const float> u, std::span<const float> v);
double cosine(std::span<const double> u, std::span<const double> v);

/// Cosine of the stored query and passage vectors; names the missing id.
double pair_similarity(const EmbeddingStore& store, std::string_view query_id,
                       std::string_view passage_id);

}  // namespace wsrank
