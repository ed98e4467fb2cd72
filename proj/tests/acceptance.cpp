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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Oracles here are written independently of the library.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "artifactprobe/artifactprobe.hpp"

namespace ap = artifactprobe;
namespace fs = std::filesystem;
using ap::Label;

namespace {

// Tolerances and thresholds, pinned.
constexpr double kPercentTol = 0.05;         // percentage points
constexpr double kChiTol = 1e-9;
constexpr double kPmiTol = 1e-10;
constexpr double kHugeSmoothing = 1e7;
constexpr double kHugeSmoothingBound = 0.01;
constexpr double kProbeFloor = 0.55;
constexpr double kProbeGap = 0.20;
constexpr std::size_t kPmiTopN = 10;
constexpr double kFalseFireCeiling = 0.02;
constexpr double kChiAlpha = 1e-3;
constexpr double kEasyPlantShare = 0.90;
constexpr double kEasyDifficultGap = 0.10;
constexpr double kGradTol = 1e-5;
constexpr double kMedNliBand = 2.0;          // percentage points
constexpr double kMedNliDifficultDrop = 0.15;

struct Outcome {
  enum Status { pass, fail, skip } status;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Outcome::pass : Outcome::fail, std::move(detail)};
}

// --- metrics ---------------------------------------------------------------

Outcome clinical_confusion_metrics() {
  // Rows gold, columns predicted: entailment, neutral, contradiction.
  const std::vector<std::vector<std::size_t>> c = {{255, 151, 68}, {126, 290, 58}, {69, 60, 345}};
  const auto m = ap::metrics_from_confusion(c, ap::default_class_list());
  const double micro = 100 * m.microF1, cp = 100 * m.precision.at(Label::contradiction),
               cr = 100 * m.recall.at(Label::contradiction), ep = 100 * m.precision.at(Label::entailment),
               er = 100 * m.recall.at(Label::entailment);
  const bool ok = std::abs(micro - 62.6) <= kPercentTol && std::abs(cp - 73.2) <= kPercentTol &&
                  std::abs(cr - 72.8) <= kPercentTol && std::abs(ep - 56.7) <= kPercentTol &&
                  std::abs(er - 53.8) <= kPercentTol &&
                  std::abs(m.microF1 - 890.0 / 1422.0) < 1e-15;
  return verdict(ok, fmt("micro %.3f, contradiction %.3f/%.3f, entailment %.3f/%.3f", micro, cp, cr, ep, er));
}

Outcome majority_on_balanced_set() {
  ap::Dataset train, eval;
  // Training set skewed towards neutral; evaluation set balanced.
  for (int i = 0; i < 30; ++i)
    train.add({"t" + std::to_string(i), "p", "h", i < 14 ? Label::neutral : ap::kAllLabels[i % 3],
               ap::Split::train});
  for (int i = 0; i < 300; ++i)
    eval.add({"e" + std::to_string(i), "p", "h", ap::kAllLabels[i % 3], ap::Split::test});
  const auto maj = ap::majority_baseline(train);
  const auto m = ap::evaluate_on(maj, eval);
  return verdict(maj.label == Label::neutral && m.microF1 == 1.0 / 3.0,
                 fmt("majority %s, micro-F1 %.17g", std::string(ap::to_string(maj.label)).c_str(), m.microF1));
}

// --- chi-square --------------------------------------------------------------

Outcome chi_square_engine() {
  const auto flat = ap::chi_square_uniform(std::vector<std::uint64_t>{10, 10, 10});
  const auto spike = ap::chi_square_uniform(std::vector<std::uint64_t>{100, 0, 0});
  bool ok = flat.stat == 0.0 && flat.pValue == 1.0 && spike.stat == 200.0 && spike.df == 2 &&
            spike.pValue == std::exp(-100.0);
  ap::Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t x[3];
    for (auto& v : x) v = ap::uniform_below(rng, 200);
    if (x[0] + x[1] + x[2] == 0) x[0] = 1;
    const double n = static_cast<double>(x[0] + x[1] + x[2]), e = n / 3.0;
    double stat = 0.0;
    for (auto v : x) stat += (static_cast<double>(v) - e) * (static_cast<double>(v) - e) / e;
    const double closed = std::exp(-stat / 2.0);
    const double general = ap::regularized_gamma_q(1.0, stat / 2.0);
    const double lib = ap::chi_square_uniform(std::vector<std::uint64_t>(x, x + 3)).pValue;
    worst = std::max({worst, std::abs(closed - general), std::abs(closed - lib)});
  }
  ok = ok && worst <= kChiTol;
  return verdict(ok, fmt("(10,10,10) stat %g p %g; (100,0,0) stat %g p %.6e; max |closed - general| %.2e",
                         flat.stat, flat.pValue, spike.stat, spike.pValue, worst));
}

// --- PMI ---------------------------------------------------------------------

using Cells = std::map<std::string, std::map<std::string, double>>;

// Smoothed contingency table over presence counts, PMI read off directly.
Cells pmi_oracle(const std::vector<ap::ClassDoc>& docs, double k, std::size_t minCount) {
  std::set<std::string> classes;
  Cells raw;
  for (const auto& d : docs) {
    classes.insert(d.cls);
    for (const auto& t : std::set<std::string>(d.tokens.begin(), d.tokens.end())) raw[t][d.cls] += 1;
  }
  Cells kept;
  for (auto& [t, row] : raw) {
    double total = 0;
    for (const auto& c : classes) total += row[c];
    if (total >= static_cast<double>(minCount)) kept[t] = row;
  }
  double n = 0;
  std::map<std::string, double> colSum, rowSum;
  for (auto& [t, row] : kept)
    for (const auto& c : classes) {
      const double v = row[c] + k;
      n += v;
      colSum[c] += v;
      rowSum[t] += v;
    }
  Cells out;
  for (auto& [t, row] : kept)
    for (const auto& c : classes)
      out[t][c] = std::log2(((row[c] + k) / n) / ((rowSum[t] / n) * (colSum[c] / n)));
  return out;
}

std::vector<ap::ClassDoc> micro_corpus(ap::Rng& rng) {
  const std::size_t numClasses = 2 + ap::uniform_below(rng, 4);
  const std::size_t vocab = 1 + ap::uniform_below(rng, 30);
  std::vector<ap::ClassDoc> docs(10 + ap::uniform_below(rng, 60));
  for (auto& d : docs) {
    d.cls = "c" + std::to_string(ap::uniform_below(rng, numClasses));
    const std::size_t len = 1 + ap::uniform_below(rng, 8);
    for (std::size_t j = 0; j < len; ++j) d.tokens.push_back("w" + std::to_string(ap::uniform_below(rng, vocab)));
  }
  return docs;
}

Outcome pmi_oracle_equivalence() {
  ap::Rng rng(77);
  double worst = 0.0, hugest = 0.0;
  std::size_t compared = 0;
  bool filterExact = true;
  for (int trial = 0; trial < 50; ++trial) {
    const auto docs = micro_corpus(rng);
    ap::PmiOptions o;
    o.smoothing = static_cast<double>(ap::uniform_below(rng, 4));
    o.minCount = ap::uniform_below(rng, 4);
    const auto t = ap::compute_pmi(docs, o);
    const auto oracle = pmi_oracle(docs, o.smoothing, o.minCount);
    if (t.entries.size() != oracle.size()) filterExact = false;
    for (const auto& [tok, row] : oracle)
      for (const auto& [cls, v] : row) {
        const auto* e = t.find(tok, cls);
        if (!e) {
          filterExact = false;
          continue;
        }
        if (!std::isfinite(v) || !std::isfinite(e->pmi)) {
          const bool same = v == e->pmi || (std::isnan(v) && std::isnan(e->pmi));
          if (!same) worst = INFINITY;
        } else {
          ++compared;
          worst = std::max(worst, std::abs(v - e->pmi));
        }
      }

    ap::PmiOptions big;
    big.smoothing = kHugeSmoothing;
    big.minCount = 0;
    for (const auto& [tok, row] : ap::compute_pmi(docs, big).entries)
      for (const auto& e : row) hugest = std::max(hugest, std::abs(e.pmi));

    ap::PmiOptions five;
    five.minCount = 5;
    std::map<std::string, std::size_t> totals;
    for (const auto& d : docs)
      for (const auto& tok : std::set<std::string>(d.tokens.begin(), d.tokens.end())) ++totals[tok];
    const auto filtered = ap::compute_pmi(docs, five);
    for (const auto& [tok, n] : totals)
      if (filtered.entries.contains(tok) != (n >= 5)) filterExact = false;
  }
  return verdict(compared > 0 && worst <= kPmiTol && hugest < kHugeSmoothingBound && filterExact,
                 fmt("max |pmi - oracle| %.2e over %zu cells, max |pmi| at k=1e7 %.2e, min-count filter %s",
                     worst, compared, hugest,
                     filterExact ? "exact" : "WRONG"));
}

// --- planted recovery ----------------------------------------------------------

Outcome planted_recovery() {
  auto cfg = ap::default_synth_config(11);
  cfg.sizePerClass = 1500;
  const auto b = ap::generate(cfg);
  const ap::Dataset train = b.dataset.filter(ap::Split::train), test = b.dataset.filter(ap::Split::test);
  const auto probe = ap::train_text_classifier(train);
  const double probeF1 = ap::evaluate_on(probe, test).microF1;
  const double majF1 = ap::evaluate_on(ap::majority_baseline(train), test).microF1;

  const auto pmi = ap::compute_pmi(b.dataset, {}, &b.gazetteer);
  std::size_t found = 0;
  std::string missing;
  for (const auto& p : cfg.plantSpecs) {
    const std::string tok = ap::planted_token(p.phrase);
    bool hit = false;
    for (const auto& r : ap::top_tokens(pmi, p.cls, kPmiTopN)) hit = hit || r.token == tok;
    if (hit) ++found;
    else missing += " " + tok;
  }
  const bool ok = probeF1 >= kProbeFloor && probeF1 - majF1 >= kProbeGap && found == cfg.plantSpecs.size();
  return verdict(ok, fmt("probe %.3f vs majority %.3f, planted tokens in top-%zu: %zu/%zu%s", probeF1, majF1,
                         kPmiTopN, found, cfg.plantSpecs.size(), missing.c_str()));
}

// --- heuristics ----------------------------------------------------------------

Outcome heuristic_detection() {
  auto cfg = ap::default_synth_config(12);
  cfg.sizePerClass = 1500;
  const auto b = ap::generate(cfg);
  std::vector<ap::LinkedPair> linked;
  for (const auto& ex : b.dataset) linked.push_back(ap::link_entities(ex, b.kb));
  const auto rep = ap::heuristic_report(b.dataset, b.kb);
  bool ok = true;
  std::string detail;
  for (auto k : ap::kAllHeuristics) {
    const auto& planted = b.truth.heuristic(k);
    std::size_t hit = 0, falseFire = 0, others = 0;
    for (std::size_t i = 0; i < b.dataset.size(); ++i) {
      const bool fires = ap::detect(linked[i], k, b.kb);
      if (planted.contains(b.dataset[i].id)) hit += fires;
      else {
        ++others;
        falseFire += fires;
      }
    }
    const double falseRate = static_cast<double>(falseFire) / static_cast<double>(others);
    const auto& r = rep[k];
    const double p = r.applicable ? r.chi->pValue : 1.0;
    ok = ok && !planted.empty() && hit == planted.size() && falseRate < kFalseFireCeiling && p < kChiAlpha;
    detail += fmt("%s %zu/%zu planted, %.2f%% others, p %.2e; ", std::string(ap::to_string(k)).c_str(), hit,
                  planted.size(), 100 * falseRate, p);
  }
  detail.resize(detail.size() - 2);
  return verdict(ok, detail);
}

// --- AFLite --------------------------------------------------------------------

struct AfliteRun {
  ap::PartitionManifest manifest;
  std::size_t plantsEasy = 0, plants = 0;
};

Outcome aflite_behaviour() {
  // 6000 instances: half carry a class-specific token whose vector lies on
  // that class's axis, half are label-independent filler.
  ap::SynthConfig cfg;
  cfg.seed = 13;
  cfg.sizePerClass = 2000;
  cfg.embeddingDim = 32;
  cfg.plantSpecs = {{Label::entailment, "alpha", 0.5, ap::PlantLocation::hypothesis},
                    {Label::neutral, "beta", 0.5, ap::PlantLocation::hypothesis},
                    {Label::contradiction, "gamma", 0.5, ap::PlantLocation::hypothesis}};
  const auto b = ap::generate(cfg);
  const auto in = ap::build_representation(b.dataset, b.vectors, &b.gazetteer,
                                           ap::RepresentationKind::hypothesisOnly);
  ap::AfliteParams p;
  p.ensembleSize = 16;
  p.trainSize = 2000;
  p.cutoff = 250;
  p.threshold = 0.75;
  p.seed = 13;
  auto run = [&] {
    AfliteRun r;
    r.manifest = ap::run_aflite(in, p);
    std::set<std::string> easy;
    for (const auto& t : r.manifest.easy) easy.insert(t.id);
    for (const auto& id : b.truth.plantedIds) {
      ++r.plants;
      r.plantsEasy += easy.contains(id);
    }
    return r;
  };
  const AfliteRun first = run(), second = run();
  const double share = static_cast<double>(first.plantsEasy) / static_cast<double>(first.plants);

  // Probe trained on the training split, scored on held-out dev + test.
  ap::Corpus c;
  c.train = b.dataset.filter(ap::Split::train);
  c.dev = b.dataset.filter(ap::Split::dev);
  c.test = b.dataset.filter(ap::Split::test);
  c.combined = b.dataset;
  const auto probe = ap::train_text_classifier(c.train);
  const auto parts = ap::apply_partition(c.combined, first.manifest);
  auto held_out = [](const ap::Dataset& d) {
    ap::Dataset out = d.filter(ap::Split::dev);
    for (const auto& ex : d.filter(ap::Split::test)) out.add(ex);
    return out;
  };
  const double full = ap::evaluate_on(probe, held_out(c.combined)).microF1;
  const double easy = ap::evaluate_on(probe, held_out(parts.easy)).microF1;
  const double diff = ap::evaluate_on(probe, held_out(parts.difficult)).microF1;
  const bool same = first.manifest.checksum == second.manifest.checksum;
  const bool ok = first.plants == 3000 && in.ids.size() == 6000 && share >= kEasyPlantShare && easy > full &&
                  full > diff && easy - diff >= kEasyDifficultGap && same;
  return verdict(ok, fmt("plants in easy %zu/%zu (%.1f%%), easy %zu difficult %zu, probe easy %.3f > full %.3f "
                         "> difficult %.3f, checksums %s",
                         first.plantsEasy, first.plants, 100 * share, first.manifest.easy.size(),
                         first.manifest.difficult.size(), easy, full, diff, same ? "identical" : "DIFFER"));
}

// --- logistic regression ---------------------------------------------------------

Outcome logreg_gradient_check() {
  ap::Rng rng(31);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + ap::uniform_below(rng, 12), d = 1 + ap::uniform_below(rng, 6);
    const std::size_t k = 2 + ap::uniform_below(rng, 2);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
      for (double& v : r) v = ap::standard_normal(rng);
    const auto X = ap::DenseMatrix::from_rows(rows);
    std::vector<std::size_t> y(n);
    for (auto& v : y) v = ap::uniform_below(rng, k);
    std::vector<double> W(k * (d + 1));
    for (double& w : W) w = ap::standard_normal(rng);
    const double l2 = ap::uniform_unit(rng);
    std::vector<double> g;
    ap::logreg_objective(X, y, k, W, l2, &g);
    for (std::size_t j = 0; j < W.size(); ++j) {
      const double h = 1e-5;
      auto up = W, down = W;
      up[j] += h;
      down[j] -= h;
      const double fd = (ap::logreg_objective(X, y, k, up, l2, nullptr) -
                         ap::logreg_objective(X, y, k, down, l2, nullptr)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])));
    }
  }
  return verdict(worst <= kGradTol, fmt("max relative error %.2e over 20 instances", worst));
}

// --- optional credentialed reproduction ------------------------------------------

Outcome credentialed_reproduction() {
  const char* dir = std::getenv("ARTIFACTPROBE_MEDNLI_DIR");
  const char* vec = std::getenv("ARTIFACTPROBE_MEDNLI_VECTORS");
  if (!dir || !vec)
    return {Outcome::skip, "set ARTIFACTPROBE_MEDNLI_DIR (train/dev/test.jsonl) and ARTIFACTPROBE_MEDNLI_VECTORS"};
  ap::RunConfig cfg;
  cfg.train = fs::path(dir) / "train.jsonl";
  cfg.dev = fs::path(dir) / "dev.jsonl";
  cfg.test = fs::path(dir) / "test.jsonl";
  cfg.propagate_seed();
  const ap::Corpus c = ap::load_corpus(cfg);
  const auto base = ap::run_baselines(c, cfg.classifier);
  const double dev = 100 * *base.scores[0].probeDev, test = 100 * *base.scores[0].probeTest;
  const ap::EmbeddingTable table = ap::load_vectors(vec);
  const auto in = ap::build_representation(c.combined, table, nullptr, ap::RepresentationKind::hypothesisOnly);
  const auto m = ap::run_aflite(in, cfg.aflite);
  const auto rows = ap::evaluate_partitions(c, m, cfg.classifier, &base.probes[0]);
  double drop = 0.0;
  for (const auto& r : rows)
    if (r.model == "probe" && r.evalSplit == "test" && r.full && r.difficult) drop = *r.full - *r.difficult;
  const bool ok = std::abs(dev - 64.8) <= kMedNliBand && std::abs(test - 62.6) <= kMedNliBand &&
                  drop >= kMedNliDifficultDrop;
  return verdict(ok, fmt("probe dev %.1f test %.1f, difficult drop on test %.3f", dev, test, drop));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metrics-from-clinical-confusion-counts", clinical_confusion_metrics},
      {"majority-baseline-on-balanced-set", majority_on_balanced_set},
      {"chi-square-engine", chi_square_engine},
      {"pmi-oracle-equivalence", pmi_oracle_equivalence},
      {"planted-artifact-recovery", planted_recovery},
      {"heuristic-detection", heuristic_detection},
      {"aflite-easy-difficult-behaviour", aflite_behaviour},
      {"logreg-gradient-check", logreg_gradient_check},
      {"credentialed-reproduction (optional)", credentialed_reproduction},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {Outcome::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.status == Outcome::pass ? "PASS" : o.status == Outcome::fail ? "FAIL" : "SKIP";
    failures += o.status == Outcome::fail;
    std::printf("%s %s: %s [%.1fs]\n", tag, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
