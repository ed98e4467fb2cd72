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

#ifndef ARTIFACTPROBE_CLI_HPP_
#define ARTIFACTPROBE_CLI_HPP_

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "artifactprobe/pipeline.hpp"

namespace artifactprobe::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

inline constexpr std::string_view kEnvPrefix = "ARTIFACTPROBE_";

inline std::string env_name(std::string_view longName) {
  std::string s(kEnvPrefix);
  for (char c : longName) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

/// "class:phrase:rate[:premise|hypothesis]"
inline PlantSpec parse_plant_spec(const std::string& s) {
  const auto parts = ::artifactprobe::detail::split_on(s, ':');
  if (parts.size() < 3 || parts.size() > 4) throw UsageError("bad plant spec '" + s + "'");
  PlantSpec p;
  const auto l = parse_label(parts[0]);
  if (!l) throw UsageError("bad plant class '" + parts[0] + "'");
  p.cls = *l;
  p.phrase = parts[1];
  try {
    p.rate = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("bad plant rate '" + parts[2] + "'");
  }
  if (parts.size() == 4) {
    if (parts[3] == "premise") p.location = PlantLocation::premise;
    else if (parts[3] != "hypothesis") throw UsageError("bad plant location '" + parts[3] + "'");
  }
  return p;
}

/// "kind:class:rate"
inline KbPlantSpec parse_kb_plant_spec(const std::string& s) {
  const auto parts = ::artifactprobe::detail::split_on(s, ':');
  if (parts.size() != 3) throw UsageError("bad kb plant spec '" + s + "'");
  KbPlantSpec k;
  k.kind = parse_heuristic_kind(parts[0]);
  const auto l = parse_label(parts[1]);
  if (!l) throw UsageError("bad kb plant class '" + parts[1] + "'");
  k.targetClass = *l;
  try {
    k.rate = std::stod(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("bad kb plant rate '" + parts[2] + "'");
  }
  return k;
}

namespace detail {

inline std::string path_or_dash(const std::optional<fs::path>& p) {
  return p ? p->string() : "-";
}

inline void add_meta(Report& r, const std::string& command, const RunConfig& cfg) {
  r.meta = {
      {"version", std::string(kVersion)},
      {"command", command},
      {"seed", std::to_string(cfg.seed)},
      {"train", path_or_dash(cfg.train)},
      {"dev", path_or_dash(cfg.dev)},
      {"test", path_or_dash(cfg.test)},
      {"vectors", path_or_dash(cfg.vectors)},
      {"gazetteer", path_or_dash(cfg.gazetteer)},
      {"kb", path_or_dash(cfg.kb)},
      {"classifier", "dim=" + std::to_string(cfg.classifier.dim) +
                         " epochs=" + std::to_string(cfg.classifier.epochs) +
                         " lr=" + fmt_fixed(cfg.classifier.learningRate, 3) +
                         " ngrams=" + std::to_string(cfg.classifier.maxN) +
                         " buckets=" + std::to_string(cfg.classifier.bucketCount)},
      {"pmi", "smoothing=" + fmt_fixed(cfg.pmi.smoothing, 1) +
                  " min-count=" + std::to_string(cfg.pmi.minCount) +
                  " count-mode=" + (cfg.pmi.countMode == CountMode::presence ? "presence" : "occurrence") +
                  " split=" + (cfg.pmiAllSplits ? "all" : "train")},
      {"aflite", "n=" + std::to_string(cfg.aflite.ensembleSize) +
                     " m=" + std::to_string(cfg.aflite.trainSize) +
                     " k=" + std::to_string(cfg.aflite.cutoff) +
                     " tau=" + fmt_fixed(cfg.aflite.threshold, 2) +
                     (cfg.aflite.strictThreshold ? " strict" : "")},
  };
}

inline void run_validation(Report& r, const Corpus& c) {
  fill_validation(r.section("validation"), validate(c.combined));
}

inline std::optional<TextClassifier> run_baselines_section(Report& r, const Corpus& c, const RunConfig& cfg) {
  auto b = run_baselines(c, cfg.classifier);
  fill_baselines(r.section("baselines"), b.scores);
  if (b.hypothesisOnlyTest) {
    fill_confusion(r.section("confusion"), *b.hypothesisOnlyTest);
  } else {
    r.section("confusion").notes.push_back("no test split given");
  }
  if (cfg.saveModels) {
    fs::create_directories(cfg.outDir);
    b.probes[0].save(cfg.outDir / "probe-hypothesis_only.model.json");
    b.probes[1].save(cfg.outDir / "probe-premise_plus_hypothesis.model.json");
  }
  return std::move(b.probes[0]);
}

inline void run_pmi_section(Report& r, const Corpus& c, const RunConfig& cfg, const Gazetteer* g) {
  SplitSelection sel;
  if (cfg.pmiAllSplits) sel.only.reset();
  const PmiTable p = compute_pmi(c.combined, cfg.pmi, g, sel);
  auto& s = r.section("pmi");
  fill_pmi(s, p, cfg.pmiTop);
  if (!g) s.notes.insert(s.notes.begin(), "entity merging disabled (no gazetteer given)");
}

inline void run_lengths_section(Report& r, const Corpus& c, const Gazetteer* g) {
  SplitSelection sel;
  auto& s = r.section("lengths");
  fill_lengths(s, length_stats(c.combined, false, g, sel), length_stats(c.combined, true, g, sel));
  if (!g) s.notes.insert(s.notes.begin(), "entity merging disabled (no gazetteer given)");
}

inline void run_heuristics_section(Report& r, const Corpus& c, const RunConfig& cfg) {
  if (!cfg.kb) throw UsageError("missing required option --kb");
  require_exists(*cfg.kb);
  if (cfg.kbConfig) require_exists(*cfg.kbConfig);
  const KnowledgeBase kb =
      load_kb(*cfg.kb, cfg.kbConfig ? std::optional<fs::path>(*cfg.kbConfig) : std::nullopt);
  fill_heuristics(r.section("heuristics"), heuristic_report(c.combined, kb));
}

inline void run_partitions_section(Report& r, const Corpus& c, const RunConfig& cfg, const Gazetteer* g,
                       const TextClassifier* hypothesisProbe, bool reuseManifests) {
  std::vector<PartitionRow> rows;
  std::vector<std::string> notes;
  if (!g) notes.emplace_back("entity merging disabled (no gazetteer given)");

  std::map<RepresentationKind, PartitionManifest> given;
  if (reuseManifests)
    for (const auto& p : cfg.manifests) {
      require_exists(p);
      auto m = load_manifest(p);
      given.emplace(m.representation.kind, std::move(m));
    }
  std::optional<EmbeddingTable> table;
  for (RepresentationKind kind : cfg.representations()) {
    PartitionManifest m;
    if (auto it = given.find(kind); it != given.end()) {
      m = it->second;
      notes.push_back(std::string(to_string(kind)) + ": using supplied manifest");
    } else {
      if (!cfg.vectors) throw UsageError("missing required option --vectors");
      if (!table) {
        require_exists(*cfg.vectors);
        table = load_vectors(*cfg.vectors);
      }
      const AfliteInput in = build_representation(c.combined, *table, g, kind);
      m = run_aflite(in, cfg.aflite, {cfg.threads});
      fs::create_directories(cfg.outDir);
      save_manifest(cfg.outDir / manifest_filename(kind), m);
      notes.push_back(std::string(to_string(kind)) + ": mean vector coverage " +
                      fmt_fixed(in.meanCoverage, 3));
    }
    notes.push_back(std::string(to_string(kind)) + ": " + std::to_string(m.iterations.size()) +
                    " iterations, easy " + std::to_string(m.easy.size()) + ", difficult " +
                    std::to_string(m.difficult.size()) + ", checksum " + m.checksum);
    r.meta.emplace_back("checksum " + std::string(to_string(kind)), m.checksum);
    auto part = evaluate_partitions(c, m, cfg.classifier, hypothesisProbe);
    rows.insert(rows.end(), part.begin(), part.end());
    if (!cfg.idsOnly) {
      const auto split = apply_partition(c.combined, m);
      auto sample = [&](const Dataset& d, const char* name) {
        for (std::size_t i = 0; i < std::min<std::size_t>(3, d.size()); ++i)
          notes.push_back(std::string(to_string(kind)) + " " + name + " sample: " + d[i].hypothesis);
      };
      sample(split.easy, "easy");
      sample(split.difficult, "difficult");
    }
  }
  fill_partitions(r.section("partitions"), rows, notes);
}

}  // namespace detail

/// Runs one command; returns a process exit code. Reports go to `out` and
/// to `<out-dir>/<command><ext>`.
inline int run_command(const std::string& command, RunConfig cfg, std::ostream& out) {
  cfg.propagate_seed();
  Report r = make_report();
  detail::add_meta(r, command, cfg);

  if (command == "synth") {
    const SynthBundle b = generate(cfg.synth);
    write_bundle(b, cfg.outDir);
    out << "wrote synthetic bundle to " << cfg.outDir.string() << ": " << b.dataset.size()
        << " examples, " << b.truth.plantedIds.size() << " planted\n";
    for (const auto& w : b.warnings) out << "warning: " << w << '\n';
    return kOk;
  }

  const Corpus c = load_corpus(cfg);
  const std::optional<Gazetteer> gaz = load_optional_gazetteer(cfg);
  const Gazetteer* g = gaz ? &*gaz : nullptr;

  if (command == "validate") {
    detail::run_validation(r, c);
  } else if (command == "baseline") {
    detail::run_baselines_section(r, c, cfg);
  } else if (command == "pmi") {
    detail::run_pmi_section(r, c, cfg, g);
  } else if (command == "lengths") {
    detail::run_lengths_section(r, c, g);
  } else if (command == "heuristics") {
    detail::run_heuristics_section(r, c, cfg);
  } else if (command == "aflite") {
    detail::run_partitions_section(r, c, cfg, g, nullptr, false);
  } else if (command == "report") {
    detail::run_validation(r, c);
    const auto probe = detail::run_baselines_section(r, c, cfg);
    detail::run_pmi_section(r, c, cfg, g);
    detail::run_lengths_section(r, c, g);
    if (cfg.kb) detail::run_heuristics_section(r, c, cfg);
    else r.section("heuristics").notes.push_back("no knowledge base given");
    if (cfg.vectors || !cfg.manifests.empty())
      detail::run_partitions_section(r, c, cfg, g, probe ? &*probe : nullptr, true);
    else r.section("partitions").notes.push_back("no vectors or manifests given");
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  render_to_file(r, cfg.format, cfg.outDir, command);
  out << render(r, cfg.format);
  return kOk;
}

/// Full command-line entry point. Flags override ARTIFACTPROBE_* environment
/// variables, which override the --config file.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"Annotation-artifact diagnostics for sentence-pair corpora", "artifactprobe"};
  app.set_config("--config", "", "Key-value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kVersion));

  auto opt = [&](const std::string& name, auto& target, const std::string& help) {
    return app.add_option("--" + name, target, help)->envname(env_name(name));
  };
  std::string train, dev, test, vectors, gazetteer, kb, kbConfig, outDir = cfg.outDir.string();
  std::string format = "text", countMode = "presence";
  std::vector<std::string> plants, kbPlants;
  opt("train", train, "Training records (JSONL)");
  opt("dev", dev, "Dev records (JSONL)");
  opt("test", test, "Test records (JSONL)");
  opt("vectors", vectors, "Word vectors (text format)");
  opt("gazetteer", gazetteer, "Multi-word entity phrases, one per line");
  opt("kb", kb, "Knowledge base TSV");
  opt("kb-config", kbConfig, "Cue and cause lists for the knowledge base");
  opt("manifest", cfg.manifests, "Existing partition manifest(s) for `report`");
  opt("out", outDir, "Output directory");
  opt("format", format, "text | delimited | markdown");
  opt("seed", cfg.seed, "Master seed");
  opt("threads", cfg.threads, "Worker threads (results do not depend on it)");
  app.add_flag("--ids-only,!--no-ids-only", cfg.idsOnly,
               "Keep sentence text out of reports (default on)")
      ->envname(env_name("ids-only"));
  app.add_flag("--save-models", cfg.saveModels, "Save trained probe classifiers");
  opt("dim", cfg.classifier.dim, "Classifier embedding width");
  opt("epochs", cfg.classifier.epochs, "Classifier epochs");
  opt("lr", cfg.classifier.learningRate, "Classifier learning rate");
  opt("ngrams", cfg.classifier.maxN, "Classifier max n-gram order");
  opt("buckets", cfg.classifier.bucketCount, "Classifier hash buckets");
  opt("smoothing", cfg.pmi.smoothing, "PMI add-k smoothing");
  opt("min-count", cfg.pmi.minCount, "PMI minimum token count");
  opt("count-mode", countMode, "PMI counting: presence | occurrence");
  opt("top", cfg.pmiTop, "Tokens per class in the PMI table");
  app.add_flag("--pmi-all-splits", cfg.pmiAllSplits, "Compute PMI on all splits, not just train")
      ->envname(env_name("pmi-all-splits"));
  opt("ensemble-size", cfg.aflite.ensembleSize, "AFLite ensemble size n");
  opt("train-size", cfg.aflite.trainSize, "AFLite training size m");
  opt("cutoff", cfg.aflite.cutoff, "AFLite cutoff k");
  opt("threshold", cfg.aflite.threshold, "AFLite threshold tau");
  app.add_flag("--strict-threshold", cfg.aflite.strictThreshold, "Use score > tau")
      ->envname(env_name("strict-threshold"));
  opt("l2", cfg.aflite.logreg.l2Strength, "AFLite logistic-regression L2 strength");
  opt("max-iters", cfg.aflite.logreg.maxIters, "AFLite logistic-regression iterations");
  opt("representation", cfg.representation,
      "hypothesis_only | premise_plus_hypothesis | both");
  opt("size-per-class", cfg.synth.sizePerClass, "synth: examples per class");
  opt("vocab-size", cfg.synth.vocabSize, "synth: background vocabulary size");
  opt("embedding-dim", cfg.synth.embeddingDim, "synth: vector width");
  opt("plant", plants, "synth: class:phrase:rate[:premise]");
  opt("kb-plant", kbPlants, "synth: kind:class:rate");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "Check splits, ids and class balance"},
      {"baseline", "Majority and probe classifiers"},
      {"pmi", "Token-class PMI ranking"},
      {"lengths", "Hypothesis length statistics"},
      {"heuristics", "Heuristic detectors and chi-square tests"},
      {"aflite", "Adversarial filtering and partition evaluation"},
      {"report", "Every analysis the inputs allow"},
      {"synth", "Generate a synthetic corpus bundle"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  // CLI11 lets a config file shadow environment variables, so environment
  // values not overridden on the command line are passed as flags instead.
  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  auto given = [&](const std::string& name) {
    for (const auto& a : args)
      if (a == name || a.rfind(name + "=", 0) == 0) return true;
    return false;
  };
  for (const CLI::Option* o : app.get_options()) {
    const std::string& var = o->get_envname();
    const char* value = var.empty() ? nullptr : std::getenv(var.c_str());
    if (!value) continue;
    const std::string name = "--" + o->get_single_name();
    if (given(name) || (name == "--ids-only" && given("--no-ids-only"))) continue;
    args.insert(args.begin(), name + "=" + value);
  }

  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    auto set = [](const std::string& s) {
      return s.empty() ? std::nullopt : std::optional<fs::path>(s);
    };
    cfg.train = set(train);
    cfg.dev = set(dev);
    cfg.test = set(test);
    cfg.vectors = set(vectors);
    cfg.gazetteer = set(gazetteer);
    cfg.kb = set(kb);
    cfg.kbConfig = set(kbConfig);
    cfg.outDir = outDir;
    cfg.format = parse_render_format(format);
    if (countMode == "presence") cfg.pmi.countMode = CountMode::presence;
    else if (countMode == "occurrence") cfg.pmi.countMode = CountMode::occurrence;
    else throw UsageError("unknown count mode '" + countMode + "'");
    if (!plants.empty()) {
      cfg.synth.plantSpecs.clear();
      for (const auto& p : plants) cfg.synth.plantSpecs.push_back(parse_plant_spec(p));
    }
    if (!kbPlants.empty()) {
      cfg.synth.kbPlantSpecs.clear();
      for (const auto& k : kbPlants) cfg.synth.kbPlantSpecs.push_back(parse_kb_plant_spec(k));
    }
    cfg.representations();
    return run_command(app.get_subcommands().front()->get_name(), std::move(cfg), out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

}  // namespace artifactprobe::cli

#endif  // ARTIFACTPROBE_CLI_HPP_
