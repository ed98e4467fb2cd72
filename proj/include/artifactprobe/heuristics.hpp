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

#ifndef ARTIFACTPROBE_HEURISTICS_HPP_
#define ARTIFACTPROBE_HEURISTICS_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "artifactprobe/chisquare.hpp"
#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

/// Tree numbers look like "C19" or "C19.246.099": one uppercase letter,
/// digits, then any number of ".digits" segments.
inline bool is_valid_tree_number(std::string_view code) {
  if (code.size() < 2 || !std::isupper(static_cast<unsigned char>(code[0]))) return false;
  bool needDigit = true;
  for (std::size_t i = 1; i < code.size(); ++i) {
    const char c = code[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      needDigit = false;
    } else if (c == '.' && !needDigit) {
      needDigit = true;
    } else {
      return false;
    }
  }
  return !needDigit;
}

/// True iff `hypoTree` is a proper ancestor of `premTree`: a strict prefix
/// ending on a dot-segment boundary ("C19" vs "C19.246").
inline bool is_hypernym(std::string_view hypoTree, std::string_view premTree) {
  if (!is_valid_tree_number(hypoTree))
    throw DataError("malformed tree number '" + std::string(hypoTree) + "'");
  if (!is_valid_tree_number(premTree))
    throw DataError("malformed tree number '" + std::string(premTree) + "'");
  return premTree.size() > hypoTree.size() && premTree.starts_with(hypoTree) &&
         premTree[hypoTree.size()] == '.';
}

struct Concept {
  std::string conceptId;
  std::string canonicalName;
  std::vector<std::string> aliases;
  std::vector<std::string> treeNumbers;
  std::string definition;
};

inline const std::vector<std::string>& default_negation_cues() {
  static const std::vector<std::string> cues = {"does not have", "no finding", "no", "denies"};
  return cues;
}

inline const std::vector<std::string>& default_health_cues() {
  static const std::vector<std::string> cues = {"normal", "healthy", "discharged"};
  return cues;
}

inline const std::vector<std::string>& default_cause_names() {
  static const std::vector<std::string> names = {
      "smoking", "substance-related disorders", "mental disorders",
      "alcoholism", "homelessness", "obesity"};
  return names;
}

inline constexpr std::string_view kDefaultPatientSurface = "patient";

namespace detail {

inline std::string normalize_surface(std::string_view s) {
  const TokenSeq t = tokenize(s);
  return join(t.tokens, 0, t.size(), ' ');
}

inline std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t b = 0;
  while (true) {
    const std::size_t e = s.find(sep, b);
    out.emplace_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) break;
    b = e + 1;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  for (auto& part : split_on(s, '|')) {
    auto t = trim(part);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace detail

/// MeSH-style concepts indexed by lowercase surface form, plus the cue and
/// cause lists the heuristic detectors consult. Immutable once built.
class KnowledgeBase {
 public:
  struct Candidate {
    std::size_t rank;   // 0 = canonical name, then alias position
    std::size_t order;  // concept insertion order
    std::string conceptId;
  };

  /// Throws DataError on duplicate ids or malformed tree numbers.
  void add(Concept c) {
    if (c.conceptId.empty()) throw DataError("concept with empty id");
    if (concepts_.contains(c.conceptId))
      throw DataError("duplicate concept id '" + c.conceptId + "'");
    if (c.treeNumbers.empty())
      throw DataError("concept '" + c.conceptId + "' has no tree number");
    for (const auto& t : c.treeNumbers)
      if (!is_valid_tree_number(t))
        throw DataError("malformed tree number '" + t + "' for concept '" + c.conceptId + "'");
    const std::size_t order = order_.size();
    std::vector<std::string> surfaces{c.canonicalName};
    surfaces.insert(surfaces.end(), c.aliases.begin(), c.aliases.end());
    for (std::size_t r = 0; r < surfaces.size(); ++r) {
      const std::string norm = detail::normalize_surface(surfaces[r]);
      if (norm.empty()) continue;
      auto& list = surfaceIndex_[norm];
      if (std::any_of(list.begin(), list.end(),
                      [&](const Candidate& x) { return x.conceptId == c.conceptId; }))
        continue;
      list.push_back({r, order, c.conceptId});
      std::stable_sort(list.begin(), list.end(), [](const Candidate& a, const Candidate& b) {
        return a.rank != b.rank ? a.rank < b.rank : a.order < b.order;
      });
      maxSurfaceLen_ = std::max<std::size_t>(
          maxSurfaceLen_, static_cast<std::size_t>(std::count(norm.begin(), norm.end(), ' ')) + 1);
    }
    order_.push_back(c.conceptId);
    concepts_.emplace(c.conceptId, std::move(c));
  }

  const Concept* concept_by_id(const std::string& id) const {
    auto it = concepts_.find(id);
    return it == concepts_.end() ? nullptr : &it->second;
  }

  /// Top-ranked concept for a surface form (normalized internally).
  const Concept* lookup(std::string_view surface) const {
    auto it = surfaceIndex_.find(detail::normalize_surface(surface));
    if (it == surfaceIndex_.end()) return nullptr;
    return concept_by_id(it->second.front().conceptId);
  }

  const std::vector<Candidate>* candidates(const std::string& normalized) const {
    auto it = surfaceIndex_.find(normalized);
    return it == surfaceIndex_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return concepts_.size(); }
  std::size_t maxSurfaceLen() const { return maxSurfaceLen_; }
  const std::vector<std::string>& conceptIds() const { return order_; }

  const std::set<std::string>& causeList() const { return causeList_; }
  const std::vector<std::string>& negationCues() const { return negationCues_; }
  const std::vector<std::string>& healthCues() const { return healthCues_; }
  const std::string& patientConceptId() const { return patientConceptId_; }

  void set_cause_list(std::set<std::string> ids) {
    for (const auto& id : ids)
      if (!concepts_.contains(id))
        throw DataError("cause concept '" + id + "' is not in the knowledge base");
    causeList_ = std::move(ids);
  }
  void set_negation_cues(std::vector<std::string> cues) { negationCues_ = normalize(cues); }
  void set_health_cues(std::vector<std::string> cues) { healthCues_ = normalize(cues); }
  void set_patient_concept(std::string id) {
    if (!id.empty() && !concepts_.contains(id))
      throw DataError("patient concept '" + id + "' is not in the knowledge base");
    patientConceptId_ = std::move(id);
  }

  /// Cause list and patient concept resolved by name through the surface
  /// index; names the knowledge base does not know are skipped.
  void apply_default_lists() {
    std::set<std::string> causes;
    for (const auto& name : default_cause_names())
      if (const auto* c = lookup(name)) causes.insert(c->conceptId);
    causeList_ = std::move(causes);
    const auto* p = lookup(kDefaultPatientSurface);
    patientConceptId_ = p ? p->conceptId : std::string();
  }

 private:
  static std::vector<std::string> normalize(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& s : in) {
      auto n = detail::normalize_surface(s);
      if (!n.empty()) out.push_back(std::move(n));
    }
    return out;
  }

  std::map<std::string, Concept> concepts_;
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::vector<Candidate>> surfaceIndex_;
  std::size_t maxSurfaceLen_ = 0;
  std::set<std::string> causeList_;
  std::vector<std::string> negationCues_ = normalize(default_negation_cues());
  std::vector<std::string> healthCues_ = normalize(default_health_cues());
  std::string patientConceptId_;
};

/// Tab-separated rows: conceptId, canonicalName, aliases (pipe-separated),
/// tree numbers (pipe-separated), optional definition. '#' lines are comments.
inline KnowledgeBase read_kb(std::istream& in) {
  KnowledgeBase kb;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_on(line, '\t');
    if (f.size() < 4 || f.size() > 5)
      throw DataError("malformed knowledge-base row at line " + std::to_string(lineno));
    Concept c;
    c.conceptId = detail::trim(f[0]);
    c.canonicalName = detail::trim(f[1]);
    c.aliases = detail::split_list(f[2]);
    c.treeNumbers = detail::split_list(f[3]);
    if (f.size() == 5) c.definition = f[4];
    for (const auto& t : c.treeNumbers)
      if (!is_valid_tree_number(t))
        throw DataError("malformed tree number '" + t + "' at line " + std::to_string(lineno));
    if (c.treeNumbers.empty())
      throw DataError("missing tree number at line " + std::to_string(lineno));
    try {
      kb.add(std::move(c));
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " at line " + std::to_string(lineno));
    }
  }
  kb.apply_default_lists();
  return kb;
}

/// "key = a | b | c" lines. Keys: cause_concepts, negation_cues, health_cues,
/// patient_concept. Keys that are absent keep their current value.
inline void read_kb_config(std::istream& in, KnowledgeBase& kb) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError("malformed config line " + std::to_string(lineno));
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const auto values = detail::split_list(std::string_view(t).substr(eq + 1));
    if (key == "cause_concepts") {
      kb.set_cause_list({values.begin(), values.end()});
    } else if (key == "negation_cues") {
      kb.set_negation_cues(values);
    } else if (key == "health_cues") {
      kb.set_health_cues(values);
    } else if (key == "patient_concept") {
      if (values.size() > 1)
        throw DataError("patient_concept takes one id (line " + std::to_string(lineno) + ")");
      kb.set_patient_concept(values.empty() ? std::string() : values.front());
    } else {
      throw DataError("unknown config key '" + key + "' at line " + std::to_string(lineno));
    }
  }
}

inline KnowledgeBase load_kb(const std::filesystem::path& path,
                             const std::optional<std::filesystem::path>& configPath = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open knowledge-base file: " + path.string());
  KnowledgeBase kb;
  try {
    kb = read_kb(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (configPath) {
    std::ifstream cin(*configPath);
    if (!cin) throw DataError("cannot open knowledge-base config: " + configPath->string());
    try {
      read_kb_config(cin, kb);
    } catch (const DataError& e) {
      throw DataError(configPath->string() + ": " + e.what());
    }
  }
  return kb;
}

struct LinkedEntity {
  std::string conceptId;
  std::vector<std::string> treeNumbers;
  std::string matchedSpan;
  std::size_t tokenBegin = 0;
  std::size_t tokenEnd = 0;
};

struct LinkedPair {
  std::string exampleId;
  std::vector<LinkedEntity> premiseEntities;
  std::vector<LinkedEntity> hypothesisEntities;
  std::vector<std::string> hypothesisTokens;
};

/// Greedy longest-match linking over lowercase token spans.
inline std::vector<LinkedEntity> link_text(const std::vector<std::string>& toks,
                                           const KnowledgeBase& kb) {
  std::vector<LinkedEntity> out;
  std::size_t i = 0;
  while (i < toks.size()) {
    bool hit = false;
    for (std::size_t len = std::min(kb.maxSurfaceLen(), toks.size() - i); len >= 1; --len) {
      const std::string span = detail::join(toks, i, i + len, ' ');
      const auto* cands = kb.candidates(span);
      if (!cands) continue;
      const Concept* c = kb.concept_by_id(cands->front().conceptId);
      out.push_back({c->conceptId, c->treeNumbers, span, i, i + len});
      i += len;
      hit = true;
      break;
    }
    if (!hit) ++i;
  }
  return out;
}

inline LinkedPair link_entities(const PairExample& e, const KnowledgeBase& kb) {
  LinkedPair p;
  p.exampleId = e.id;
  p.premiseEntities = link_text(tokenize(e.premise).tokens, kb);
  p.hypothesisTokens = tokenize(e.hypothesis).tokens;
  p.hypothesisEntities = link_text(p.hypothesisTokens, kb);
  return p;
}

enum class HeuristicKind { hypernym = 0, probableCause = 1, everythingFine = 2 };

inline constexpr std::array<HeuristicKind, 3> kAllHeuristics = {
    HeuristicKind::hypernym, HeuristicKind::probableCause, HeuristicKind::everythingFine};

inline constexpr std::string_view to_string(HeuristicKind k) {
  switch (k) {
    case HeuristicKind::hypernym: return "hypernym";
    case HeuristicKind::probableCause: return "probable_cause";
    case HeuristicKind::everythingFine: return "everything_fine";
  }
  return "?";
}

inline HeuristicKind parse_heuristic_kind(std::string_view s) {
  for (auto k : kAllHeuristics)
    if (to_string(k) == s) return k;
  if (s == "probableCause") return HeuristicKind::probableCause;
  if (s == "everythingFine") return HeuristicKind::everythingFine;
  throw UsageError("unknown heuristic kind '" + std::string(s) + "'");
}

/// Whether `phrase` (space-joined tokens) occurs as a contiguous token run.
inline bool contains_phrase(const std::vector<std::string>& toks, std::string_view phrase) {
  const auto parts = detail::split_on(phrase, ' ');
  if (parts.empty() || parts.size() > toks.size()) return false;
  for (std::size_t i = 0; i + parts.size() <= toks.size(); ++i)
    if (std::equal(parts.begin(), parts.end(), toks.begin() + static_cast<std::ptrdiff_t>(i)))
      return true;
  return false;
}

inline bool detect(const LinkedPair& pair, HeuristicKind kind, const KnowledgeBase& kb) {
  switch (kind) {
    case HeuristicKind::hypernym:
      for (const auto& pe : pair.premiseEntities)
        for (const auto& he : pair.hypothesisEntities)
          for (const auto& tp : pe.treeNumbers)
            for (const auto& th : he.treeNumbers)
              if (is_hypernym(th, tp)) return true;
      return false;

    case HeuristicKind::probableCause: {
      const bool premiseCondition = std::any_of(
          pair.premiseEntities.begin(), pair.premiseEntities.end(), [](const LinkedEntity& e) {
            return std::any_of(e.treeNumbers.begin(), e.treeNumbers.end(),
                               [](const std::string& t) {
                                 return t[0] == 'C' || t[0] == 'D' || t[0] == 'E' || t[0] == 'F';
                               });
          });
      if (!premiseCondition) return false;
      return std::any_of(pair.hypothesisEntities.begin(), pair.hypothesisEntities.end(),
                         [&](const LinkedEntity& e) { return kb.causeList().contains(e.conceptId); });
    }

    case HeuristicKind::everythingFine: {
      bool shared = false;
      for (const auto& pe : pair.premiseEntities) {
        if (pe.conceptId == kb.patientConceptId()) continue;
        for (const auto& he : pair.hypothesisEntities)
          if (he.conceptId == pe.conceptId) shared = true;
      }
      if (!shared) return false;
      auto hasCue = [&](const std::vector<std::string>& cues) {
        return std::any_of(cues.begin(), cues.end(), [&](const std::string& c) {
          return contains_phrase(pair.hypothesisTokens, c);
        });
      };
      return hasCue(kb.negationCues()) || hasCue(kb.healthCues());
    }
  }
  throw UsageError("unknown heuristic kind");
}

inline bool detect(const LinkedPair& pair, std::string_view kind, const KnowledgeBase& kb) {
  return detect(pair, parse_heuristic_kind(kind), kb);
}

struct HeuristicResult {
  HeuristicKind kind = HeuristicKind::hypernym;
  std::uint64_t satisfyingCount = 0;
  std::array<std::uint64_t, kNumLabels> perClassCounts{};
  /// False when no pair satisfies the heuristic; `chi` is then empty.
  bool applicable = false;
  std::optional<ChiSquareResult> chi;
  Label topClass = Label::entailment;
  double topClassShare = 0.0;
  std::vector<std::string> satisfyingIds;
};

struct HeuristicReport {
  std::array<HeuristicResult, 3> results;
  const HeuristicResult& operator[](HeuristicKind k) const {
    return results[static_cast<std::size_t>(k)];
  }
};

/// Detector counts per gold class with a chi-square uniformity test each.
/// Intended for the combined corpus (all splits).
inline HeuristicReport heuristic_report(const Dataset& d, const KnowledgeBase& kb) {
  HeuristicReport rep;
  for (auto k : kAllHeuristics) rep.results[static_cast<std::size_t>(k)].kind = k;
  for (const auto& ex : d) {
    const LinkedPair lp = link_entities(ex, kb);
    for (auto k : kAllHeuristics) {
      if (!detect(lp, k, kb)) continue;
      auto& r = rep.results[static_cast<std::size_t>(k)];
      ++r.satisfyingCount;
      ++r.perClassCounts[index_of(ex.label)];
      r.satisfyingIds.push_back(ex.id);
    }
  }
  for (auto& r : rep.results) {
    if (r.satisfyingCount == 0) continue;
    r.applicable = true;
    r.chi = chi_square_uniform(std::span<const std::uint64_t>(r.perClassCounts));
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumLabels; ++c)
      if (r.perClassCounts[c] > r.perClassCounts[best]) best = c;
    r.topClass = kAllLabels[best];
    r.topClassShare =
        static_cast<double>(r.perClassCounts[best]) / static_cast<double>(r.satisfyingCount);
  }
  return rep;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_HEURISTICS_HPP_
