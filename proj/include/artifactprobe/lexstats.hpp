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

#ifndef ARTIFACTPROBE_LEXSTATS_HPP_
#define ARTIFACTPROBE_LEXSTATS_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

/// presence: c(t,y) counts class-y documents containing t.
/// occurrence: c(t,y) counts every occurrence of t in class-y documents.
enum class CountMode { presence, occurrence };

struct PmiOptions {
  double smoothing = 50.0;
  std::size_t minCount = 5;
  CountMode countMode = CountMode::presence;
};

struct PmiEntry {
  double pmi = 0.0;
  std::size_t rawCount = 0;
  /// Fraction of the class's documents that contain the token.
  double classDocFraction = 0.0;
  /// Smoothed joint probability p(t, y).
  double joint = 0.0;
};

/// A document (hypothesis) tagged with its class name.
struct ClassDoc {
  std::string cls;
  std::vector<std::string> tokens;
};

struct PmiTable {
  double smoothing = 0.0;
  std::size_t minCount = 0;
  std::vector<std::string> classes;
  /// token -> one entry per class, in `classes` order.
  std::map<std::string, std::vector<PmiEntry>> entries;

  std::optional<std::size_t> class_index(const std::string& c) const {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == c) return i;
    return std::nullopt;
  }

  const PmiEntry* find(const std::string& token, const std::string& cls) const {
    auto it = entries.find(token);
    auto ci = class_index(cls);
    if (it == entries.end() || !ci) return nullptr;
    return &it->second[*ci];
  }
};

/// Token-class PMI with add-k smoothing. Tokens whose total count is below
/// minCount are dropped first; the smoothing constant is then added to every
/// (token, class) cell of the retained vocabulary before normalizing:
///   pmi(t, y) = log2( p(t,y) / (p(t,.) p(.,y)) ).
/// Classes are the distinct document classes, sorted by name, unless
/// `classes` is supplied.
inline PmiTable compute_pmi(const std::vector<ClassDoc>& docs, const PmiOptions& opt = {},
                            std::vector<std::string> classes = {}) {
  if (docs.empty()) throw UsageError("PMI needs a nonempty corpus");
  if (!(opt.smoothing >= 0.0)) throw UsageError("smoothing must be >= 0");
  if (classes.empty()) {
    std::set<std::string> s;
    for (const auto& d : docs) s.insert(d.cls);
    classes.assign(s.begin(), s.end());
  }
  std::unordered_map<std::string, std::size_t> cindex;
  for (std::size_t i = 0; i < classes.size(); ++i) cindex.emplace(classes[i], i);
  const std::size_t k = classes.size();

  std::vector<std::size_t> docsPerClass(k, 0);
  std::unordered_map<std::string, std::vector<std::size_t>> counts, presence;
  for (const auto& d : docs) {
    auto ci = cindex.find(d.cls);
    if (ci == cindex.end()) throw UsageError("document class '" + d.cls + "' not in class list");
    const std::size_t c = ci->second;
    ++docsPerClass[c];
    std::unordered_set<std::string> seen;
    for (const auto& t : d.tokens) {
      auto& cnt = counts[t];
      if (cnt.empty()) cnt.assign(k, 0);
      auto& pres = presence[t];
      if (pres.empty()) pres.assign(k, 0);
      if (opt.countMode == CountMode::occurrence) ++cnt[c];
      if (seen.insert(t).second) {
        ++pres[c];
        if (opt.countMode == CountMode::presence) ++cnt[c];
      }
    }
  }

  PmiTable table;
  table.smoothing = opt.smoothing;
  table.minCount = opt.minCount;
  table.classes = classes;

  std::vector<std::string> vocab;
  for (const auto& [t, cnt] : counts) {
    std::size_t total = 0;
    for (std::size_t c : cnt) total += c;
    if (total >= opt.minCount) vocab.push_back(t);
  }
  std::sort(vocab.begin(), vocab.end());
  if (vocab.empty()) return table;

  double grand = 0.0;
  std::vector<double> classMass(k, 0.0);
  std::vector<double> tokenMass(vocab.size(), 0.0);
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    const auto& cnt = counts[vocab[v]];
    for (std::size_t c = 0; c < k; ++c) {
      const double s = static_cast<double>(cnt[c]) + opt.smoothing;
      tokenMass[v] += s;
      classMass[c] += s;
      grand += s;
    }
  }
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    const auto& cnt = counts[vocab[v]];
    const auto& pres = presence[vocab[v]];
    std::vector<PmiEntry> row(k);
    for (std::size_t c = 0; c < k; ++c) {
      const double joint = (static_cast<double>(cnt[c]) + opt.smoothing) / grand;
      const double pt = tokenMass[v] / grand;
      const double py = classMass[c] / grand;
      row[c].joint = joint;
      row[c].pmi = std::log2(joint / (pt * py));
      row[c].rawCount = cnt[c];
      row[c].classDocFraction =
          docsPerClass[c] ? static_cast<double>(pres[c]) / static_cast<double>(docsPerClass[c])
                          : 0.0;
    }
    table.entries.emplace(vocab[v], std::move(row));
  }
  return table;
}

/// Which split(s) feed the lexical statistics.
struct SplitSelection {
  std::optional<Split> only = Split::train;  // nullopt = every example
  bool accepts(const PairExample& ex) const { return !only || ex.split == *only; }
};

/// Hypothesis documents for the three NLI labels; merged via `gazetteer`
/// when one is given.
inline std::vector<ClassDoc> hypothesis_docs(const Dataset& d, const Gazetteer* gazetteer,
                                             SplitSelection sel = {}) {
  std::vector<ClassDoc> docs;
  for (const auto& ex : d) {
    if (!sel.accepts(ex)) continue;
    docs.push_back({std::string(to_string(ex.label)), preprocess(ex.hypothesis, gazetteer).tokens});
  }
  return docs;
}

inline std::vector<std::string> label_class_names() {
  std::vector<std::string> out;
  for (Label l : kAllLabels) out.emplace_back(to_string(l));
  return out;
}

inline PmiTable compute_pmi(const Dataset& d, const PmiOptions& opt = {},
                            const Gazetteer* gazetteer = nullptr, SplitSelection sel = {}) {
  if (d.empty()) throw UsageError("PMI needs a nonempty dataset");
  auto docs = hypothesis_docs(d, gazetteer, sel);
  if (docs.empty()) throw UsageError("no examples in the selected split");
  return compute_pmi(docs, opt, label_class_names());
}

struct RankedToken {
  std::string token;
  double pmi = 0.0;
  double classDocFraction = 0.0;
};

/// Highest-PMI tokens for one class; ties by token ascending.
inline std::vector<RankedToken> top_tokens(const PmiTable& p, const std::string& cls,
                                           std::size_t n) {
  const auto ci = p.class_index(cls);
  if (!ci) throw UsageError("unknown class '" + cls + "'");
  std::vector<RankedToken> all;
  all.reserve(p.entries.size());
  for (const auto& [tok, row] : p.entries)
    all.push_back({tok, row[*ci].pmi, row[*ci].classDocFraction});
  const std::size_t take = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(),
                    [](const RankedToken& a, const RankedToken& b) {
                      if (a.pmi != b.pmi) return a.pmi > b.pmi;
                      return a.token < b.token;
                    });
  all.resize(take);
  return all;
}

inline std::vector<RankedToken> top_tokens(const PmiTable& p, Label cls, std::size_t n) {
  return top_tokens(p, std::string(to_string(cls)), n);
}

enum class EntityMode { separate, merged };

struct LengthSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
};

struct LengthStats {
  EntityMode entityMode = EntityMode::separate;
  std::array<LengthSummary, kNumLabels> perClass{};
};

inline LengthSummary summarize_lengths(std::vector<std::size_t> lens) {
  LengthSummary s;
  s.count = lens.size();
  if (lens.empty()) return s;
  std::sort(lens.begin(), lens.end());
  double sum = 0.0;
  for (auto l : lens) sum += static_cast<double>(l);
  s.mean = sum / static_cast<double>(lens.size());
  const std::size_t mid = lens.size() / 2;
  s.median = lens.size() % 2 ? static_cast<double>(lens[mid])
                             : 0.5 * static_cast<double>(lens[mid - 1] + lens[mid]);
  return s;
}

/// Hypothesis token-count mean and median per class. With `merged`, the
/// gazetteer's phrases count as one token each.
inline LengthStats length_stats(const Dataset& d, bool merged, const Gazetteer* gazetteer,
                                SplitSelection sel = {}) {
  if (d.empty()) throw UsageError("length statistics need a nonempty dataset");
  std::array<std::vector<std::size_t>, kNumLabels> lens;
  const Gazetteer* g = merged ? gazetteer : nullptr;
  for (const auto& ex : d)
    if (sel.accepts(ex)) lens[index_of(ex.label)].push_back(preprocess(ex.hypothesis, g).size());
  LengthStats out;
  out.entityMode = merged ? EntityMode::merged : EntityMode::separate;
  for (std::size_t c = 0; c < kNumLabels; ++c) out.perClass[c] = summarize_lengths(lens[c]);
  return out;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_LEXSTATS_HPP_
