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

#ifndef ARTIFACTPROBE_SYNTHGEN_HPP_
#define ARTIFACTPROBE_SYNTHGEN_HPP_

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/embedstore.hpp"
#include "artifactprobe/heuristics.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

enum class PlantLocation { hypothesis, premise };

/// Insert `phrase` into exactly round(rate * sizePerClass) examples of `cls`.
struct PlantSpec {
  Label cls = Label::entailment;
  std::string phrase;
  double rate = 0.0;
  PlantLocation location = PlantLocation::hypothesis;
};

/// Rewrite exactly round(rate * sizePerClass) examples of `targetClass` into
/// pairs that satisfy the `kind` detector.
struct KbPlantSpec {
  HeuristicKind kind = HeuristicKind::hypernym;
  double rate = 0.0;
  Label targetClass = Label::entailment;
};

struct SynthConfig {
  std::size_t sizePerClass = 1000;
  std::size_t vocabSize = 400;
  std::size_t minSentenceLen = 4;
  std::size_t maxSentenceLen = 8;
  std::vector<PlantSpec> plantSpecs;
  std::vector<KbPlantSpec> kbPlantSpecs;
  std::uint64_t seed = 0;
  std::size_t embeddingDim = 32;
  /// train / dev / test shares, applied per class.
  std::array<double, 3> splitFractions{0.8, 0.1, 0.1};
  /// Share of ordinary premises that mention one disease or drug entity.
  double premiseEntityRate = 0.5;

  void check() const {
    if (sizePerClass < 1) throw UsageError("sizePerClass must be >= 1");
    if (vocabSize < 1) throw UsageError("vocabSize must be >= 1");
    if (minSentenceLen > maxSentenceLen) throw UsageError("sentence length range is empty");
    if (embeddingDim <= kNumLabels) throw UsageError("embeddingDim must exceed the class count");
    for (const auto& p : plantSpecs) {
      if (!(p.rate >= 0.0 && p.rate <= 1.0)) throw UsageError("plant rate outside [0, 1]");
      if (tokenize(p.phrase).empty()) throw UsageError("empty plant phrase");
    }
    for (const auto& k : kbPlantSpecs)
      if (!(k.rate >= 0.0 && k.rate <= 1.0)) throw UsageError("kb plant rate outside [0, 1]");
    double s = 0.0;
    for (double f : splitFractions) {
      if (f < 0.0) throw UsageError("negative split fraction");
      s += f;
    }
    if (std::abs(s - 1.0) > 1e-9) throw UsageError("split fractions must sum to 1");
  }
};

struct GroundTruth {
  /// "class:phrase" -> ids carrying that planted phrase.
  std::map<std::string, std::set<std::string>> byPlant;
  std::array<std::set<std::string>, 3> byHeuristic;
  /// Union of every planted id (lexical and knowledge-base).
  std::set<std::string> plantedIds;

  const std::set<std::string>& heuristic(HeuristicKind k) const {
    return byHeuristic[static_cast<std::size_t>(k)];
  }
};

struct SynthBundle {
  Dataset dataset;
  Gazetteer gazetteer;
  KnowledgeBase kb;
  std::vector<Concept> concepts;
  EmbeddingTable vectors;
  GroundTruth truth;
  std::vector<std::string> warnings;
};

inline std::string plant_key(const PlantSpec& p) {
  return std::string(to_string(p.cls)) + ":" + p.phrase;
}

/// The planted token as it appears after entity merging.
inline std::string planted_token(std::string_view phrase) {
  const TokenSeq t = tokenize(phrase);
  return detail::join(t.tokens, 0, t.size(), t.size() > 1 ? '_' : ' ');
}

namespace synth_detail {

struct Family {
  Concept parent;
  std::vector<Concept> children;
};

inline Concept make_concept(std::string id, std::string name, std::vector<std::string> aliases,
                            std::vector<std::string> trees) {
  return Concept{std::move(id), std::move(name), std::move(aliases), std::move(trees), ""};
}

// A small MeSH-shaped hierarchy. Ids and tree numbers mirror MeSH where
// convenient; nothing depends on them being real.
inline std::vector<Family> disease_families() {
  return {
      {make_concept("D004700", "endocrine system disease", {"endocrine disease"}, {"C19"}),
       {make_concept("D003920", "diabetes mellitus", {"diabetes"}, {"C19.246"}),
        make_concept("D007037", "hypothyroidism", {}, {"C19.874.397"})}},
      {make_concept("D002318", "cardiovascular disease", {"heart disease"}, {"C14"}),
       {make_concept("D006333", "heart failure", {"cardiac failure"}, {"C14.280.434"}),
        make_concept("D006973", "hypertension", {"high blood pressure"}, {"C14.907.489"})}},
      {make_concept("D012140", "respiratory tract disease", {"lung disease"}, {"C08"}),
       {make_concept("D001249", "asthma", {}, {"C08.127.108"}),
        make_concept("D011014", "pneumonia", {}, {"C08.381.677"})}},
      {make_concept("D009422", "nervous system disease", {"neurologic disease"}, {"C10"}),
       {make_concept("D004827", "epilepsy", {"seizure disorder"}, {"C10.228.140.490"}),
        make_concept("D020521", "stroke", {"cerebrovascular accident"}, {"C10.228.140.300.775"})}},
  };
}

inline std::vector<Concept> drugs() {
  return {make_concept("D007328", "insulin", {}, {"D06.472.699.587.200"}),
          make_concept("D008687", "metformin", {}, {"D02.078.370.141.450"}),
          make_concept("D001241", "aspirin", {"acetylsalicylic acid"}, {"D02.241.223.100.050"})};
}

inline std::vector<Concept> causes() {
  return {make_concept("D012907", "smoking", {"tobacco use"}, {"F01.145.805"}),
          make_concept("D000437", "alcoholism", {"alcohol abuse"}, {"F03.900.100.350"}),
          make_concept("D009765", "obesity", {}, {"C18.654.726.500"}),
          make_concept("D006703", "homelessness", {"homeless"}, {"I01.880.840.500"}),
          make_concept("D019966", "substance-related disorders", {"drug abuse"}, {"F03.900"}),
          make_concept("D001523", "mental disorders", {"psychiatric illness"}, {"F03"})};
}

inline Concept patient_concept() {
  return make_concept("D010361", "patient", {"patients"}, {"M01.643"});
}

inline std::vector<std::string> background_vocab(std::size_t n, const std::set<std::string>& reserved) {
  static const std::array<const char*, 20> syl = {"ba", "ko", "ri", "tu", "me", "sa", "lo",
                                                  "vi", "de", "ga", "pu", "ne", "zo", "fi",
                                                  "ha", "mu", "te", "yo", "ci", "ra"};
  std::vector<std::string> out;
  for (std::size_t i = 0; out.size() < n; ++i) {
    std::string w;
    // Stride through the three-syllable space so early words differ in every syllable.
    std::size_t x = i < 8000 ? (i * 7919) % 8000 : i;
    for (int s = 0; s < 3 || x > 0; ++s) {
      w += syl[x % syl.size()];
      x /= syl.size();
    }
    if (!reserved.contains(w)) out.push_back(std::move(w));
  }
  return out;
}

struct Draft {
  Label label;
  Split split = Split::train;
  std::vector<std::string> premise;
  std::vector<std::string> hypothesis;
  std::vector<std::string> plants;  // plant keys
  int kbKind = -1;
};

inline std::string join_segments(const std::vector<std::string>& segs) {
  std::string s;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i) s += ' ';
    s += segs[i];
  }
  return s;
}

inline std::vector<double> random_unit(Rng& rng, std::size_t dim, std::size_t skip) {
  std::vector<double> v(dim, 0.0);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (std::size_t k = skip; k < dim; ++k) {
      v[k] = standard_normal(rng);
      norm += v[k] * v[k];
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace synth_detail

/// Builds a class-balanced synthetic corpus with planted artifacts, plus
/// the gazetteer, knowledge base and word vectors needed to analyze it.
inline SynthBundle generate(const SynthConfig& cfg) {
  using namespace synth_detail;
  cfg.check();
  SynthBundle out;

  const auto families = disease_families();
  const auto drugList = drugs();
  const auto causeList = causes();
  const Concept patient = patient_concept();
  std::vector<const Concept*> leafConditions;
  for (const auto& f : families)
    for (const auto& c : f.children) leafConditions.push_back(&c);
  std::vector<const Concept*> premiseEntities = leafConditions;
  for (const auto& d : drugList) premiseEntities.push_back(&d);

  out.concepts.push_back(patient);
  for (const auto& f : families) {
    out.concepts.push_back(f.parent);
    for (const auto& c : f.children) out.concepts.push_back(c);
  }
  for (const auto& c : drugList) out.concepts.push_back(c);
  for (const auto& c : causeList) out.concepts.push_back(c);
  for (const auto& c : out.concepts) out.kb.add(c);
  out.kb.apply_default_lists();

  // Words the background vocabulary must avoid.
  std::set<std::string> reserved = {"patient", "has", "history", "of", "is", "and"};
  auto reserve_text = [&](std::string_view s) {
    for (auto& t : tokenize(s).tokens) reserved.insert(t);
  };
  for (const auto& c : out.concepts) {
    reserve_text(c.canonicalName);
    for (const auto& a : c.aliases) reserve_text(a);
  }
  for (const auto& c : default_negation_cues()) reserve_text(c);
  for (const auto& c : default_health_cues()) reserve_text(c);
  for (const auto& p : cfg.plantSpecs) reserve_text(p.phrase);
  const auto vocab = background_vocab(cfg.vocabSize, reserved);

  Rng rng(derive_seed(cfg.seed, 0x53594E5448ull));
  auto pick = [&](const auto& v) -> decltype(auto) { return v[uniform_below(rng, v.size())]; };
  auto background = [&](std::vector<std::string>& segs) {
    const std::size_t len =
        cfg.minSentenceLen + uniform_below(rng, cfg.maxSentenceLen - cfg.minSentenceLen + 1);
    for (std::size_t i = 0; i < len; ++i) segs.push_back(pick(vocab));
  };

  const std::size_t per = cfg.sizePerClass;
  std::vector<Draft> drafts;
  drafts.reserve(per * kNumLabels);
  for (Label l : kAllLabels) {
    std::vector<std::size_t> perm(per);
    for (std::size_t i = 0; i < per; ++i) perm[i] = i;
    shuffle_in_place(perm, rng);
    const auto nTrain = static_cast<std::size_t>(std::llround(cfg.splitFractions[0] * per));
    const auto nDev = static_cast<std::size_t>(std::llround(cfg.splitFractions[1] * per));
    std::vector<Split> splits(per, Split::test);
    for (std::size_t r = 0; r < per; ++r)
      splits[perm[r]] = r < nTrain ? Split::train : (r < nTrain + nDev ? Split::dev : Split::test);
    for (std::size_t i = 0; i < per; ++i) {
      Draft d{l, splits[i], {"patient", "has"}, {}, {}, -1};
      if (uniform_unit(rng) < cfg.premiseEntityRate) d.premise.push_back(pick(premiseEntities)->canonicalName);
      background(d.premise);
      background(d.hypothesis);
      drafts.push_back(std::move(d));
    }
  }
  auto class_rows = [&](Label l) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < drafts.size(); ++i)
      if (drafts[i].label == l) rows.push_back(i);
    return rows;
  };
  auto exact_count = [&](double rate, const std::string& what) {
    const auto n = static_cast<std::size_t>(std::llround(rate * static_cast<double>(per)));
    if (rate > 0.0 && rate * static_cast<double>(per) < 1.0)
      out.warnings.push_back(what + ": rate x sizePerClass < 1, nothing planted");
    return n;
  };

  for (const auto& spec : cfg.kbPlantSpecs) {
    const std::string what = "kb plant " + std::string(to_string(spec.kind));
    const std::size_t count = exact_count(spec.rate, what);
    std::vector<std::size_t> free;
    for (std::size_t r : class_rows(spec.targetClass))
      if (drafts[r].kbKind < 0) free.push_back(r);
    if (count > free.size())
      throw UsageError(what + ": not enough unplanted examples in the target class");
    for (std::size_t pos : sample_without_replacement(free.size(), count, rng)) {
      Draft& d = drafts[free[pos]];
      d.kbKind = static_cast<int>(spec.kind);
      d.premise = {"patient", "has"};
      d.hypothesis.clear();
      switch (spec.kind) {
        case HeuristicKind::hypernym: {
          const auto& fam = pick(families);
          d.premise.push_back(pick(fam.children).canonicalName);
          d.hypothesis = {"patient", "has", fam.parent.canonicalName};
          break;
        }
        case HeuristicKind::probableCause:
          d.premise.push_back(pick(premiseEntities)->canonicalName);
          d.hypothesis = {"history", "of", pick(causeList).canonicalName};
          break;
        case HeuristicKind::everythingFine: {
          const std::string x = pick(leafConditions)->canonicalName;
          d.premise.push_back(x);
          switch (uniform_below(rng, 4)) {
            case 0: d.hypothesis = {"no", x}; break;
            case 1: d.hypothesis = {x, "is", "normal"}; break;
            case 2: d.hypothesis = {"patient", "denies", x}; break;
            default: d.hypothesis = {"patient", "does not have", x}; break;
          }
          break;
        }
      }
      background(d.premise);
      background(d.hypothesis);
    }
  }

  for (const auto& spec : cfg.plantSpecs) {
    const std::string key = plant_key(spec);
    const std::size_t count = exact_count(spec.rate, "plant " + key);
    const auto rows = class_rows(spec.cls);
    for (std::size_t pos : sample_without_replacement(rows.size(), count, rng)) {
      Draft& d = drafts[rows[pos]];
      auto& segs = spec.location == PlantLocation::hypothesis ? d.hypothesis : d.premise;
      // Premise plants go after the "patient has" lead-in.
      const std::size_t lo = spec.location == PlantLocation::premise ? 2 : 0;
      const std::size_t at = lo + uniform_below(rng, segs.size() - lo + 1);
      segs.insert(segs.begin() + static_cast<std::ptrdiff_t>(at), spec.phrase);
      d.plants.push_back(key);
    }
  }

  std::vector<std::size_t> order(drafts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle_in_place(order, rng);
  char idbuf[32];
  for (std::size_t n = 0; n < order.size(); ++n) {
    const Draft& d = drafts[order[n]];
    std::snprintf(idbuf, sizeof idbuf, "syn-%06zu", n + 1);
    PairExample ex{idbuf, join_segments(d.premise), join_segments(d.hypothesis), d.label, d.split};
    for (const auto& key : d.plants) {
      out.truth.byPlant[key].insert(ex.id);
      out.truth.plantedIds.insert(ex.id);
    }
    if (d.kbKind >= 0) {
      out.truth.byHeuristic[static_cast<std::size_t>(d.kbKind)].insert(ex.id);
      out.truth.plantedIds.insert(ex.id);
    }
    out.dataset.add(std::move(ex));
  }
  for (const auto& spec : cfg.plantSpecs) out.truth.byPlant.try_emplace(plant_key(spec));

  // Gazetteer: every multi-word entity surface form and planted phrase.
  for (const auto& c : out.concepts) {
    out.gazetteer.add(c.canonicalName);
    for (const auto& a : c.aliases) out.gazetteer.add(a);
  }
  for (const auto& p : cfg.plantSpecs) out.gazetteer.add(p.phrase);

  // Vectors: planted tokens point along their class axis; everything else
  // is a random unit vector orthogonal to the class axes.
  std::map<std::string, Label> plantedAxis;
  for (const auto& p : cfg.plantSpecs) plantedAxis.try_emplace(planted_token(p.phrase), p.cls);
  std::set<std::string> words(vocab.begin(), vocab.end());
  for (const auto& w : reserved) words.insert(w);
  for (const auto& phrase : out.gazetteer.sorted_phrases()) words.insert(planted_token(phrase));
  for (const auto& [tok, cls] : plantedAxis) words.insert(tok);
  Rng vrng(derive_seed(cfg.seed, 0x564543ull));
  out.vectors = EmbeddingTable(cfg.embeddingDim);
  for (const auto& w : words) {
    std::vector<double> v = random_unit(vrng, cfg.embeddingDim, kNumLabels);
    if (auto it = plantedAxis.find(w); it != plantedAxis.end()) {
      std::fill(v.begin(), v.end(), 0.0);
      v[index_of(it->second)] = 1.0;
    }
    out.vectors.insert(w, std::vector<float>(v.begin(), v.end()));
  }
  return out;
}

/// Hypothesis plants mirroring clinical-looking artifact tokens, five per
/// class, at rates 0.2 to 0.4.
inline std::vector<PlantSpec> default_plant_specs() {
  const std::array<double, 5> rates = {0.2, 0.25, 0.3, 0.35, 0.4};
  const std::array<std::array<const char*, 5>, 3> phrases = {{
      {"responsive", "possible", "high risk", "comorbidities", "steroid medication"},
      {"cardiogenic shock", "pelvic pain", "fertility", "twins", "statin"},
      {"no treatment", "normal breathing", "bradycardic", "normal vision", "cancer history"},
  }};
  std::vector<PlantSpec> out;
  for (std::size_t c = 0; c < kNumLabels; ++c)
    for (std::size_t i = 0; i < rates.size(); ++i)
      out.push_back({kAllLabels[c], phrases[c][i], rates[i], PlantLocation::hypothesis});
  return out;
}

inline std::vector<KbPlantSpec> default_kb_plant_specs() {
  return {{HeuristicKind::hypernym, 0.15, Label::entailment},
          {HeuristicKind::probableCause, 0.15, Label::neutral},
          {HeuristicKind::everythingFine, 0.15, Label::contradiction}};
}

inline SynthConfig default_synth_config(std::uint64_t seed = 0) {
  SynthConfig c;
  c.seed = seed;
  c.plantSpecs = default_plant_specs();
  c.kbPlantSpecs = default_kb_plant_specs();
  return c;
}

/// Writes the pipeline's input formats into `dir`: train/dev/test.jsonl,
/// gazetteer.txt, kb.tsv, kb.conf, vectors.txt and ground_truth.json.
inline void write_bundle(const SynthBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (Split s : kAllSplits)
    save_records(dir / (std::string(to_string(s)) + ".jsonl"), b.dataset.filter(s));
  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw DataError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("gazetteer.txt");
    f << "# multi-word entity phrases, one per line\n";
    for (const auto& p : b.gazetteer.sorted_phrases()) f << p << '\n';
  }
  {
    auto f = open("kb.tsv");
    f << "# conceptId\tcanonicalName\taliases\ttreeNumbers\tdefinition\n";
    auto bar = [](const std::vector<std::string>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "|" : "") + v[i];
      return s;
    };
    for (const auto& c : b.concepts)
      f << c.conceptId << '\t' << c.canonicalName << '\t' << bar(c.aliases) << '\t'
        << bar(c.treeNumbers) << '\t' << c.definition << '\n';
  }
  {
    auto f = open("kb.conf");
    auto bar = [](const auto& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : " | ") + x;
      return s;
    };
    f << "cause_concepts = " << bar(b.kb.causeList()) << '\n'
      << "negation_cues = " << bar(b.kb.negationCues()) << '\n'
      << "health_cues = " << bar(b.kb.healthCues()) << '\n'
      << "patient_concept = " << b.kb.patientConceptId() << '\n';
  }
  {
    auto f = open("vectors.txt");
    write_vectors(f, b.vectors);
  }
  {
    nlohmann::ordered_json j;
    auto& plants = j["plants"] = nlohmann::ordered_json::object();
    for (const auto& [key, ids] : b.truth.byPlant) plants[key] = ids;
    auto& heur = j["heuristics"] = nlohmann::ordered_json::object();
    for (auto k : kAllHeuristics) heur[std::string(to_string(k))] = b.truth.heuristic(k);
    auto f = open("ground_truth.json");
    f << j.dump(2) << '\n';
  }
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_SYNTHGEN_HPP_
