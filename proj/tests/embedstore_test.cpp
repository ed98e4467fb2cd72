// Copyright 2026 The artifactprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sstream>

#include "artifactprobe/embedstore.hpp"

namespace ap = artifactprobe;

namespace {

ap::EmbeddingTable read(const std::string& text) {
  std::istringstream in(text);
  return ap::read_vectors(in);
}

ap::TokenSeq seq(std::vector<std::string> t, std::vector<bool> merged = {}) {
  ap::TokenSeq s;
  s.merged = merged.empty() ? std::vector<bool>(t.size(), false) : merged;
  s.tokens = std::move(t);
  return s;
}

}  // namespace

TEST(ReadVectors, HeaderAndRows) {
  const auto t = read("2 3\nw1 1 2 3\nw2 4 5 6\n");
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(*t.find("w2"), (std::vector<float>{4, 5, 6}));
}

TEST(ReadVectors, HeaderIsOptional) {
  const auto t = read("w1 1 2 3\nw2 4 5 6\n");
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
}

TEST(ReadVectors, ArityMismatchCitesLine) {
  try {
    read("2 3\nw1 1 2 3\nw2 4 5\n");
    FAIL();
  } catch (const ap::DataError& e) {
    EXPECT_STREQ(e.what(), "dim mismatch line 3");
  }
}

TEST(ReadVectors, DuplicateKeepsFirstAndWarns) {
  const auto t = read("w1 1 2\nw1 9 9\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(*t.find("w1"), (std::vector<float>{1, 2}));
  EXPECT_EQ(t.warnings.size(), 1u);
}

TEST(ReadVectors, EmptyFileIsAnError) {
  EXPECT_THROW(read(""), ap::DataError);
  EXPECT_THROW(read("0 3\n"), ap::DataError);
}

TEST(ReadVectors, WriteReadRoundTrip) {
  const auto t = read("a 0.1 -2.5 3e-7\nb 1 0 0\n");
  std::ostringstream out;
  ap::write_vectors(out, t);
  const auto u = read(out.str());
  ASSERT_EQ(u.tokens(), t.tokens());
  for (const auto& tok : t.tokens()) EXPECT_EQ(*u.find(tok), *t.find(tok));
}

TEST(EmbedTokens, SingleTokenIsIdentity) {
  const auto t = read("w1 1 2\nw2 3 6\n");
  const auto e = ap::embed_tokens(seq({"w1"}), t);
  EXPECT_EQ(e.vector, (std::vector<double>{1, 2}));
  EXPECT_EQ(e.coverage, 1.0);
}

TEST(EmbedTokens, AveragesKnownTokens) {
  const auto t = read("w1 1 2\nw2 3 6\n");
  const auto e = ap::embed_tokens(seq({"w1", "oov", "w2"}), t);
  EXPECT_EQ(e.vector, (std::vector<double>{2, 4}));
  EXPECT_DOUBLE_EQ(e.coverage, 2.0 / 3.0);
}

TEST(EmbedTokens, AllOovGivesZeroVector) {
  const auto t = read("w1 1 2\n");
  const auto e = ap::embed_tokens(seq({"x", "y"}), t);
  EXPECT_EQ(e.vector, (std::vector<double>{0, 0}));
  EXPECT_EQ(e.coverage, 0.0);
  const auto empty = ap::embed_tokens(seq({}), t);
  EXPECT_TRUE(empty.emptyInput);
  EXPECT_EQ(empty.coverage, 0.0);
}

TEST(EmbedTokens, MergedTokenFallsBackToParts) {
  const auto t = read("brain 2 0\ninjury 0 4\n");
  const auto e = ap::embed_tokens(seq({"brain_injury"}, {true}), t);
  EXPECT_EQ(e.vector, (std::vector<double>{1, 2}));
  EXPECT_EQ(e.coverage, 1.0);
  // Unmerged tokens never fall back.
  EXPECT_EQ(ap::embed_tokens(seq({"brain_injury"}), t).coverage, 0.0);
}

TEST(EmbedTokens, PermutationInvariantAndLinear) {
  const auto t = read("a 1 -2\nb 0.5 3\nc -4 1\n");
  const auto x = ap::embed_tokens(seq({"a", "b", "c", "z"}), t);
  const auto y = ap::embed_tokens(seq({"c", "z", "a", "b"}), t);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(x.vector[k], y.vector[k], 1e-12);

  const auto scaled = read("a 3 -6\nb 1.5 9\nc -12 3\n");
  const auto s = ap::embed_tokens(seq({"a", "b", "c", "z"}), scaled);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(s.vector[k], 3.0 * x.vector[k], 1e-12);
  EXPECT_GE(x.coverage, 0.0);
  EXPECT_LE(x.coverage, 1.0);
}

TEST(EmbedTokens, EmptyTableIsAnError) {
  EXPECT_THROW(ap::embed_tokens(seq({"a"}), ap::EmbeddingTable(2)), ap::UsageError);
}
