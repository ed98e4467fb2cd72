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

#ifndef ARTIFACTPROBE_PIPELINE_HPP_
#define ARTIFACTPROBE_PIPELINE_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "artifactprobe/aflite.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/embedstore.hpp"
#include "artifactprobe/heuristics.hpp"
#include "artifactprobe/lexstats.hpp"
#include "artifactprobe/metrics.hpp"
#include "artifactprobe/report.hpp"
#include "artifactprobe/synthgen.hpp"
#include "artifactprobe/text_classifier.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

namespace fs = std::filesystem;

/// Everything one CLI invocation needs. `seed` is copied into every
/// stochastic component by `propagate_seed`.
struct RunConfig {
  std::optional<fs::path> train, dev, test, vectors, gazetteer, kb, kbConfig;
  std::vector<fs::path> manifests;
  fs::path outDir = "artifactprobe-out";
  TextClassifierConfig classifier;
  PmiOptions pmi;
  std::size_t pmiTop = 15;
  bool pmiAllSplits = false;
  AfliteParams aflite;
  /// hypothesis_only, premise_plus_hypothesis or both.
  std::string representation = "both";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool idsOnly = true;
  bool saveModels = false;
  RenderFormat format = RenderFormat::text;
  SynthConfig synth = default_synth_config();

  void propagate_seed() {
    classifier.seed = seed;
    aflite.seed = seed;
    aflite.logreg.seed = seed;
    synth.seed = seed;
  }

  std::vector<RepresentationKind> representations() const {
    if (representation == "both")
      return {RepresentationKind::hypothesisOnly, RepresentationKind::premisePlusHypothesis};
    return {parse_representation(representation)};
  }
};

struct Corpus {
  Dataset train, dev, test, combined;
};

inline void require_exists(const fs::path& p) {
  if (!fs::exists(p)) throw DataError("input not found: " + p.string());
}

/// Loads the configured record files; dev and test are optional.
inline Corpus load_corpus(const RunConfig& cfg) {
  if (!cfg.train) throw UsageError("missing required option --train");
  Corpus c;
  require_exists(*cfg.train);
  c.train = load_records(*cfg.train, Split::train);
  if (cfg.dev) {
    require_exists(*cfg.dev);
    c.dev = load_records(*cfg.dev, Split::dev);
  }
  if (cfg.test) {
    require_exists(*cfg.test);
    c.test = load_records(*cfg.test, Split::test);
  }
  c.combined = combine_splits(c.train, c.dev, c.test);
  return c;
}

inline std::optional<Gazetteer> load_optional_gazetteer(const RunConfig& cfg) {
  if (!cfg.gazetteer) return std::nullopt;
  require_exists(*cfg.gazetteer);
  return load_gazetteer(*cfg.gazetteer);
}

template <typename Model>
std::optional<double> micro_f1_if_any(const Model& m, const Dataset& d) {
  if (d.empty()) return std::nullopt;
  return evaluate_on(m, d).microF1;
}

inline std::string variant_name(bool usePremise) {
  return usePremise ? "with premise" : "no premise";
}

struct BaselineOutcome {
  std::vector<BaselineScores> scores;
  std::optional<Metrics> hypothesisOnlyTest;
  std::vector<TextClassifier> probes;
};

/// Majority baseline and probe classifier, hypothesis-only and with premise.
inline BaselineOutcome run_baselines(const Corpus& c, const TextClassifierConfig& base) {
  BaselineOutcome out;
  const MajorityClassifier majority = majority_baseline(c.train);
  for (bool usePremise : {false, true}) {
    TextClassifierConfig cfg = base;
    cfg.usePremise = usePremise;
    TextClassifier probe = train_text_classifier(c.train, cfg);
    BaselineScores s;
    s.variant = variant_name(usePremise);
    s.majorityLabel = majority.label;
    s.majorityDev = micro_f1_if_any(majority, c.dev);
    s.majorityTest = micro_f1_if_any(majority, c.test);
    s.probeDev = micro_f1_if_any(probe, c.dev);
    s.probeTest = micro_f1_if_any(probe, c.test);
    if (!usePremise && !c.test.empty()) out.hypothesisOnlyTest = evaluate_on(probe, c.test);
    out.scores.push_back(std::move(s));
    out.probes.push_back(std::move(probe));
  }
  return out;
}

/// Partition-table rows for one manifest: the majority label is fixed from the
/// original training split and the probe is trained on the original
/// training split, then both are scored on full/easy/difficult dev and test.
inline std::vector<PartitionRow> evaluate_partitions(const Corpus& c, const PartitionManifest& m,
                                                     const TextClassifierConfig& base,
                                                     const TextClassifier* trainedProbe = nullptr) {
  const bool usePremise = m.representation.kind == RepresentationKind::premisePlusHypothesis;
  const PartitionedDataset parts = apply_partition(c.combined, m);
  const MajorityClassifier majority = majority_baseline(c.train);
  std::optional<TextClassifier> own;
  if (!trainedProbe || trainedProbe->config().usePremise != usePremise) {
    TextClassifierConfig cfg = base;
    cfg.usePremise = usePremise;
    own = train_text_classifier(c.train, cfg);
    trainedProbe = &*own;
  }
  std::vector<PartitionRow> rows;
  for (const char* model : {"majority class", "probe"}) {
    for (Split s : {Split::dev, Split::test}) {
      PartitionRow r{variant_name(usePremise), model, std::string(to_string(s)), {}, {}, {}};
      const Dataset full = c.combined.filter(s);
      const Dataset easy = parts.easy.filter(s);
      const Dataset difficult = parts.difficult.filter(s);
      if (std::string_view(model) == "probe") {
        r.full = micro_f1_if_any(*trainedProbe, full);
        r.easy = micro_f1_if_any(*trainedProbe, easy);
        r.difficult = micro_f1_if_any(*trainedProbe, difficult);
      } else {
        r.full = micro_f1_if_any(majority, full);
        r.easy = micro_f1_if_any(majority, easy);
        r.difficult = micro_f1_if_any(majority, difficult);
      }
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

inline std::string manifest_filename(RepresentationKind k) {
  return "manifest-" + std::string(to_string(k)) + ".json";
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_PIPELINE_HPP_
