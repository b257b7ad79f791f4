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

#include "wsrank/embeddings.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "wsrank/error.hpp"
#include "wsrank/log.hpp"
#include "wsrank/simd/kernels.hpp"

namespace wsrank {

EmbeddingStore::EmbeddingStore(std::size_t dim, std::string provenance)
    : dim_(dim), provenance_(std::move(provenance)) {
  if (dim_ == 0) throw InputError("embedding dimension must be >= 1");
}

void EmbeddingStore::add(std::string id, std::span<const float> vector) {
  if (vector.size() != dim_) {
    throw InputError("embedding '" + id + "' has length " + std::to_string(vector.size()) +
                     ", expected " + std::to_string(dim_));
  }
  for (float x : vector) {
    if (!std::isfinite(x)) throw InputError("embedding '" + id + "' has a non-finite component");
  }
  if (!index_.emplace(id, ids_.size()).second) {
    throw InputError("duplicate embedding id '" + id + "'");
  }
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), vector.begin(), vector.end());
}

bool EmbeddingStore::contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

std::span<const float> EmbeddingStore::at(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) {
    throw InputError("no embedding for id '" + std::string(id) + "' in store '" +
                     provenance_ + "'");
  }
  return row(it->second);
}

std::span<const float> EmbeddingStore::row(std::size_t i) const {
  return {data_.data() + i * dim_, dim_};
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  if (a.dim_ != b.dim_ || a.ids_ != b.ids_ || a.data_.size() != b.data_.size()) return false;
  return std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
}

namespace {

constexpr std::array<char, 4> kMagic{'E', 'M', 'B', '1'};

template <typename T>
T read_le(const unsigned char* p) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
  U v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return std::bit_cast<T>(v);
}

template <typename T>
void write_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint32_t>;
  const U v = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

[[noreturn]] void size_mismatch(const std::string& detail) {
  throw InputError("embedding file size mismatch: " + detail);
}

}  // namespace

EmbeddingStore read_embeddings(std::istream& in, std::string provenance) {
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 12) size_mismatch("header truncated");
  if (!std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw InputError("embedding file lacks EMB1 magic");
  }
  const auto count = read_le<std::uint32_t>(buf.data() + 4);
  const auto dim = read_le<std::uint32_t>(buf.data() + 8);
  if (dim == 0) throw InputError("embedding file declares dim 0");

  EmbeddingStore store(dim, std::move(provenance));
  std::vector<float> vec(dim);
  std::size_t pos = 12;
  for (std::uint32_t r = 0; r < count; ++r) {
    if (pos + 2 > buf.size()) size_mismatch("record " + std::to_string(r) + " truncated");
    const auto id_len = read_le<std::uint16_t>(buf.data() + pos);
    pos += 2;
    const std::size_t need = static_cast<std::size_t>(id_len) + 4ull * dim;
    if (pos + need > buf.size()) size_mismatch("record " + std::to_string(r) + " truncated");
    std::string id(reinterpret_cast<const char*>(buf.data() + pos), id_len);
    pos += id_len;
    for (std::uint32_t j = 0; j < dim; ++j, pos += 4) vec[j] = read_le<float>(buf.data() + pos);
    store.add(std::move(id), vec);
  }
  if (pos != buf.size()) {
    size_mismatch(std::to_string(buf.size() - pos) + " trailing bytes after " +
                  std::to_string(count) + " records");
  }
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path, std::string provenance) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  if (provenance.empty()) provenance = path.stem().string();
  try {
    return read_embeddings(in, std::move(provenance));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_embeddings(const EmbeddingStore& store, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  write_le(out, static_cast<std::uint32_t>(store.size()));
  write_le(out, static_cast<std::uint32_t>(store.dim()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const std::string& id = store.ids()[i];
    if (id.size() > 0xffff) throw InputError("embedding id longer than 65535 bytes");
    write_le(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (float x : store.row(i)) write_le(out, x);
  }
}

void save_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write embedding file " + path.string());
  write_embeddings(store, out);
}

namespace {

double finish_cosine(double dot, double uu, double vv) {
  if (uu == 0.0 || vv == 0.0) {
    log::warn("cosine of a zero vector; returning 0");
    return 0.0;
  }
  // sqrt(uu * uu) == uu exactly, so cosine(u, u) is exactly 1.
  return std::clamp(dot / std::sqrt(uu * vv), -1.0, 1.0);
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) throw InputError("cosine of vectors with different lengths");
  return finish_cosine(simd::dot_f32(u, v), simd::dot_f32(u, u), simd::dot_f32(v, v));
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InputError("cosine of vectors with different lengths");
  return finish_cosine(simd::dot(u, v), simd::dot(u, u), simd::dot(v, v));
}

double pair_similarity(const EmbeddingStore& store, std::string_view query_id,
                       std::string_view passage_id) {
  if (!store.contains(query_id)) {
    throw InputError("store '" + store.provenance() + "' has no vector for query '" +
                     std::string(query_id) + "'");
  }
  if (!store.contains(passage_id)) {
    throw InputError("store '" + store.provenance() + "' has no vector for passage '" +
                     std::string(passage_id) + "'");
  }
  return cosine(store.at(query_id), store.at(passage_id));
}

}  // namespace wsrank
