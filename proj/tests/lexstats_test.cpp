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

#include <cmath>

#include "artifactprobe/lexstats.hpp"

namespace ap = artifactprobe;

namespace {

// Builds the full smoothed (token x class) contingency table from scratch
// and reads PMI off it. Presence counting; tokens under minCount dropped.
std::map<std::pair<std::string, std::string>, double> brute_force_pmi(
    const std::vector<ap::ClassDoc>& docs, double k, std::size_t minCount) {
  std::set<std::string> classes, tokens;
  for (const auto& d : docs) {
    classes.insert(d.cls);
    tokens.insert(d.tokens.begin(), d.tokens.end());
  }
  std::map<std::pair<std::string, std::string>, double> cell;
  for (const auto& t : tokens)
    for (const auto& c : classes) {
      double n = 0;
      for (const auto& d : docs)
        if (d.cls == c && std::find(d.tokens.begin(), d.tokens.end(), t) != d.tokens.end()) n += 1;
      cell[{t, c}] = n;
    }
  std::set<std::string> kept;
  for (const auto& t : tokens) {
    double total = 0;
    for (const auto& c : classes) total += cell[{t, c}];
    if (total >= static_cast<double>(minCount)) kept.insert(t);
  }
  double grand = 0;
  for (const auto& t : kept)
    for (const auto& c : classes) grand += cell[{t, c}] + k;
  std::map<std::pair<std::string, std::string>, double> out;
  for (const auto& t : kept)
    for (const auto& c : classes) {
      double pt = 0, pc = 0;
      for (const auto& c2 : classes) pt += (cell[{t, c2}] + k) / grand;
      for (const auto& t2 : kept) pc += (cell[{t2, c}] + k) / grand;
      out[{t, c}] = std::log2(((cell[{t, c}] + k) / grand) / (pt * pc));
    }
  return out;
}

std::vector<ap::ClassDoc> random_corpus(ap::Rng& rng) {
  static const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g", "h"};
  static const std::vector<std::string> classes = {"x", "y", "z"};
  std::vector<ap::ClassDoc> docs;
  const std::size_t n = 5 + ap::uniform_below(rng, 40);
  for (std::size_t i = 0; i < n; ++i) {
    ap::ClassDoc d{classes[ap::uniform_below(rng, 3)], {}};
    const std::size_t len = 1 + ap::uniform_below(rng, 6);
    for (std::size_t j = 0; j < len; ++j) d.tokens.push_back(words[ap::uniform_below(rng, words.size())]);
    docs.push_back(std::move(d));
  }
  return docs;
}

ap::Dataset dataset_from(const std::vector<std::pair<ap::Label, std::string>>& rows) {
  ap::Dataset d;
  for (std::size_t i = 0; i < rows.size(); ++i)
    d.add({"r" + std::to_string(i), "p", rows[i].second, rows[i].first, ap::Split::train});
  return d;
}

}  // namespace

TEST(Pmi, EqualPresenceAcrossBalancedClassesIsZero) {
  std::vector<ap::ClassDoc> docs;
  for (const char* c : {"x", "y", "z"})
    for (int i = 0; i < 10; ++i) docs.push_back({c, {"shared", i < 4 ? "sometimes" : "other"}});
  const auto t = ap::compute_pmi(docs);
  for (const auto& [tok, row] : t.entries)
    for (const auto& e : row) EXPECT_NEAR(e.pmi, 0.0, 1e-12) << tok;
}

TEST(Pmi, MinCountDropsRareTokens) {
  std::vector<ap::ClassDoc> docs;
  for (int i = 0; i < 4; ++i) docs.push_back({"x", {"rare"}});
  for (int i = 0; i < 5; ++i) docs.push_back({"y", {"common"}});
  ap::PmiOptions o;
  o.minCount = 5;
  const auto t = ap::compute_pmi(docs, o);
  EXPECT_FALSE(t.entries.contains("rare"));
  EXPECT_TRUE(t.entries.contains("common"));
}

TEST(Pmi, SingleTokenVocabularyMatchesContingencyOracle) {
  // 3 classes x 100 docs; the token appears in 30 class-A docs only.
  std::vector<ap::ClassDoc> docs;
  for (const char* c : {"A", "B", "C"})
    for (int i = 0; i < 100; ++i)
      docs.push_back({c, std::string(c) == "A" && i < 30 ? std::vector<std::string>{"tok"}
                                                        : std::vector<std::string>{}});
  const auto t = ap::compute_pmi(docs);
  const auto oracle = brute_force_pmi(docs, 50, 5);
  for (const char* c : {"A", "B", "C"})
    EXPECT_NEAR(t.find("tok", c)->pmi, oracle.at({"tok", c}), 1e-12);
  // With one retained token p(t,.) = 1, so every class scores exactly 0.
  EXPECT_NEAR(t.find("tok", "A")->pmi, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(t.find("tok", "A")->classDocFraction, 0.3);
}

TEST(Pmi, RandomMicroCorporaMatchOracle) {
  ap::Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto docs = random_corpus(rng);
    const double k = static_cast<double>(ap::uniform_below(rng, 5));
    const std::size_t minCount = ap::uniform_below(rng, 4);
    ap::PmiOptions o;
    o.smoothing = k;
    o.minCount = minCount;
    const auto t = ap::compute_pmi(docs, o);
    const auto oracle = brute_force_pmi(docs, k, minCount);
    std::size_t cells = 0;
    for (const auto& [tok, row] : t.entries)
      for (std::size_t c = 0; c < t.classes.size(); ++c) {
        ++cells;
        const double want = oracle.at({tok, t.classes[c]});
        if (std::isinf(want)) EXPECT_TRUE(std::isinf(row[c].pmi));
        else EXPECT_NEAR(row[c].pmi, want, 1e-10);
      }
    EXPECT_EQ(cells, oracle.size());
  }
}

TEST(Pmi, JointSumsToOne) {
  ap::Rng rng(5);
  const auto t = ap::compute_pmi(random_corpus(rng), {3.0, 1, ap::CountMode::presence});
  double s = 0;
  for (const auto& [tok, row] : t.entries)
    for (const auto& e : row) s += e.joint;
  EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(Pmi, DuplicationInvariantWithoutSmoothing) {
  ap::Rng rng(77);
  auto docs = random_corpus(rng);
  ap::PmiOptions o;
  o.smoothing = 0;
  o.minCount = 1;
  const auto once = ap::compute_pmi(docs, o);
  auto twice = docs;
  twice.insert(twice.end(), docs.begin(), docs.end());
  const auto doubled = ap::compute_pmi(twice, o);
  for (const auto& [tok, row] : once.entries)
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double a = row[c].pmi, b = doubled.entries.at(tok)[c].pmi;
      if (std::isinf(a)) EXPECT_EQ(a, b);
      else EXPECT_NEAR(a, b, 1e-12);
    }
}

TEST(Pmi, HugeSmoothingFlattensEverything) {
  ap::Rng rng(8);
  ap::PmiOptions o;
  o.smoothing = 1e7;
  o.minCount = 1;
  const auto t = ap::compute_pmi(random_corpus(rng), o);
  for (const auto& [tok, row] : t.entries)
    for (const auto& e : row) EXPECT_LT(std::abs(e.pmi), 0.01);
}

TEST(Pmi, OccurrenceModeCountsRepeats) {
  std::vector<ap::ClassDoc> docs = {{"x", {"a", "a", "a"}}, {"y", {"b"}}};
  ap::PmiOptions o;
  o.minCount = 1;
  o.smoothing = 0;
  EXPECT_EQ(ap::compute_pmi(docs, o).find("a", "x")->rawCount, 1u);
  o.countMode = ap::CountMode::occurrence;
  const auto t = ap::compute_pmi(docs, o);
  EXPECT_EQ(t.find("a", "x")->rawCount, 3u);
  EXPECT_DOUBLE_EQ(t.find("a", "x")->classDocFraction, 1.0);
}

TEST(Pmi, NegativeSmoothingIsAnError) {
  ap::PmiOptions o;
  o.smoothing = -1;
  EXPECT_THROW(ap::compute_pmi(std::vector<ap::ClassDoc>{{"x", {"a"}}}, o), ap::UsageError);
}

TEST(Pmi, DatasetPathUsesTrainSplitAndMergesEntities) {
  auto d = dataset_from({{ap::Label::neutral, "brain injury noted"},
                         {ap::Label::neutral, "brain injury again"},
                         {ap::Label::entailment, "plain words"}});
  d.add({"dev1", "p", "brain injury", ap::Label::contradiction, ap::Split::dev});
  ap::Gazetteer g;
  g.add("brain injury");
  ap::PmiOptions o;
  o.minCount = 1;
  const auto merged = ap::compute_pmi(d, o, &g);
  EXPECT_EQ(merged.find("brain_injury", "neutral")->rawCount, 2u);
  EXPECT_EQ(merged.find("brain_injury", "contradiction")->rawCount, 0u);
  EXPECT_EQ(merged.find("brain", "neutral"), nullptr);
  ap::SplitSelection all;
  all.only.reset();
  EXPECT_EQ(ap::compute_pmi(d, o, &g, all).find("brain_injury", "contradiction")->rawCount, 1u);

  // Without merging, tokens with no underscore agree with the merged table
  // wherever no phrase applied.
  const auto separate = ap::compute_pmi(d, o, nullptr);
  EXPECT_EQ(separate.find("plain", "entailment")->rawCount,
            merged.find("plain", "entailment")->rawCount);
}

TEST(TopTokens, OrderingAndEdgeCases) {
  std::vector<ap::ClassDoc> docs;
  for (int i = 0; i < 6; ++i) docs.push_back({"x", {"beta", "alpha"}});
  for (int i = 0; i < 6; ++i) docs.push_back({"y", {"gamma"}});
  ap::PmiOptions o;
  o.minCount = 1;
  const auto t = ap::compute_pmi(docs, o);
  EXPECT_TRUE(ap::top_tokens(t, "x", 0).empty());
  const auto top = ap::top_tokens(t, "x", 10);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].token, "alpha");
  EXPECT_EQ(top[1].token, "beta");
  EXPECT_EQ(top[0].pmi, top[1].pmi);
  EXPECT_EQ(top[2].token, "gamma");
  EXPECT_THROW(ap::top_tokens(t, "nope", 3), ap::UsageError);
}

TEST(LengthStats, MeanAndMedian) {
  const auto s = ap::summarize_lengths({3, 7, 5});
  EXPECT_EQ(s.mean, 5.0);
  EXPECT_EQ(s.median, 5.0);
  EXPECT_EQ(ap::summarize_lengths({1, 2, 3, 10}).median, 2.5);
}

TEST(LengthStats, MergingShortensByOne) {
  const auto d = dataset_from({{ap::Label::neutral, "history of brain injury"}});
  ap::Gazetteer g;
  g.add("brain injury");
  const std::size_t n = ap::index_of(ap::Label::neutral);
  EXPECT_EQ(ap::length_stats(d, false, &g).perClass[n].mean, 4.0);
  EXPECT_EQ(ap::length_stats(d, true, &g).perClass[n].mean, 3.0);
}
