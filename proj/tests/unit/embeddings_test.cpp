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

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "wsrank/embeddings.hpp"
#include "wsrank/error.hpp"
#include "wsrank/log.hpp"
#include "wsrank/rng.hpp"

namespace wsrank {
namespace {

std::string expect_error(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const InputError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected InputError";
  return {};
}

EmbeddingStore two_by_four() {
  EmbeddingStore s(4, "test");
  s.add("q", std::vector<float>{1, 0, 0, 0});
  s.add("p", std::vector<float>{0.5f, 0.5f, -1, 2});
  return s;
}

TEST(Embeddings, WriteReadRoundTrip) {
  const EmbeddingStore s = two_by_four();
  std::stringstream buf;
  write_embeddings(s, buf);
  const EmbeddingStore back = read_embeddings(buf, "test");
  EXPECT_EQ(back.dim(), 4u);
  EXPECT_EQ(back.size(), 2u);
  EXPECT_TRUE(back == s);
  EXPECT_EQ(back.ids(), (std::vector<std::string>{"q", "p"}));
}

TEST(Embeddings, ExactByteLayout) {
  EmbeddingStore s(2, "x");
  s.add("ab", std::vector<float>{1.0f, -2.0f});
  std::ostringstream out;
  write_embeddings(s, out);
  const std::string b = out.str();
  const unsigned char expected[] = {'E', 'M', 'B', '1', 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 'a', 'b',
                                    0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
  ASSERT_EQ(b.size(), sizeof expected);
  EXPECT_EQ(std::memcmp(b.data(), expected, sizeof expected), 0);
}

TEST(Embeddings, RejectsTruncatedAndTrailingBytes) {
  std::ostringstream out;
  write_embeddings(two_by_four(), out);
  const std::string full = out.str();
  for (std::size_t cut : {full.size() - 1, full.size() - 9, std::size_t{6}}) {
    std::istringstream in(full.substr(0, cut));
    EXPECT_THROW(read_embeddings(in, "t"), InputError) << cut;
  }
  std::istringstream extra(full + "z");
  EXPECT_THROW(read_embeddings(extra, "t"), InputError);
  std::istringstream magic("EMB2" + full.substr(4));
  EXPECT_THROW(read_embeddings(magic, "t"), InputError);
}

TEST(Embeddings, RejectsNanNamingTheId) {
  EmbeddingStore s(2, "t");
  const std::string msg = expect_error([&] {
    s.add("bad-id", std::vector<float>{1.0f, std::numeric_limits<float>::quiet_NaN()});
  });
  EXPECT_NE(msg.find("bad-id"), std::string::npos) << msg;
  EXPECT_THROW(s.add("inf", std::vector<float>{std::numeric_limits<float>::infinity(), 0}),
               InputError);
  EXPECT_THROW(s.add("short", std::vector<float>{1.0f}), InputError);
  s.add("ok", std::vector<float>{1, 2});
  EXPECT_THROW(s.add("ok", std::vector<float>{1, 2}), InputError);
}

TEST(Embeddings, NanInFileIsRejected) {
  std::ostringstream out;
  write_embeddings(two_by_four(), out);
  std::string bytes = out.str();
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + bytes.size() - 4, &nan, 4);
  std::istringstream in(bytes);
  const std::string msg = expect_error([&] { read_embeddings(in, "t"); });
  EXPECT_NE(msg.find("'p'"), std::string::npos) << msg;
}

TEST(Cosine, KnownValues) {
  EXPECT_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{1, 0}), 1.0);
  EXPECT_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
  EXPECT_NEAR(cosine(std::vector<double>{1, 2, 3}, std::vector<double>{4, 5, 6}),
              0.9746318461970762, 1e-15);
  EXPECT_NEAR(cosine(std::vector<float>{1, 2, 3}, std::vector<float>{4, 5, 6}),
              0.9746318461970762, 1e-15);
}

TEST(Cosine, ZeroVectorGivesZeroWithWarning) {
  int warnings = 0;
  auto prev = log::set_warning_sink([&](std::string_view) { ++warnings; });
  EXPECT_EQ(cosine(std::vector<double>{0, 0}, std::vector<double>{1, 2}), 0.0);
  log::set_warning_sink(std::move(prev));
  EXPECT_EQ(warnings, 1);
}

TEST(Cosine, SelfSimilarityScaleInvarianceAndRange) {
  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<float> u(n);
    std::vector<float> v(n);
    for (auto& x : u) x = static_cast<float>(rng.normal());
    for (auto& x : v) x = static_cast<float>(rng.normal());
    EXPECT_NEAR(cosine(u, u), 1.0, 1e-15);
    const double c = cosine(u, v);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
    std::vector<float> scaled(v);
    for (auto& x : scaled) x *= 4.0f;  // power of two: exact in float
    EXPECT_NEAR(cosine(u, scaled), c, 1e-15);
  }
}

TEST(PairSimilarity, AddressesVectorsById) {
  const EmbeddingStore s = two_by_four();
  EXPECT_NEAR(pair_similarity(s, "q", "p"), cosine(s.at("q"), s.at("p")), 0.0);
  const std::string msg = expect_error([&] { pair_similarity(s, "q", "missing"); });
  EXPECT_NE(msg.find("missing"), std::string::npos);
}

}  // namespace
}  // namespace wsrank
