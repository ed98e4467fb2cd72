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

#ifndef ARTIFACTPROBE_TEXT_CLASSIFIER_HPP_
#define ARTIFACTPROBE_TEXT_CLASSIFIER_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/metrics.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

/// 64-bit FNV-1a over the UTF-8 bytes of a feature string. Feature buckets
/// are fnv1a64(feature) % bucketCount.
inline constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline constexpr std::string_view kPremiseSeparator = "<sep>";

struct TextClassifierConfig {
  int dim = 100;
  int epochs = 5;
  double learningRate = 0.1;
  int maxN = 2;
  std::uint64_t bucketCount = 2'000'000;
  std::uint64_t seed = 0;
  bool usePremise = false;
};

struct Prediction {
  Label label = Label::entailment;
  /// Probabilities in class-list order.
  std::vector<double> probs;
};

/// Bag-of-n-grams linear classifier: hashed feature embeddings are averaged
/// into a hidden vector and fed to a full softmax.
///
/// The input matrix is logically bucketCount x dim with every row initialized
/// uniform(-1/dim, 1/dim) from a generator seeded by (seed, bucket). Only rows
/// that training touched are materialized; the rest are regenerated on demand,
/// so the model behaves exactly like its dense counterpart.
class TextClassifier {
 public:
  explicit TextClassifier(TextClassifierConfig cfg = {},
                          ClassList classes = default_class_list())
      : cfg_(cfg), classes_(std::move(classes)) {
    if (cfg_.dim < 1) throw UsageError("dim must be >= 1");
    if (cfg_.bucketCount < 1) throw UsageError("bucketCount must be >= 1");
    if (cfg_.maxN < 1) throw UsageError("maxN must be >= 1");
    if (classes_.empty()) throw UsageError("class list is empty");
    output_.assign(classes_.size(), std::vector<double>(static_cast<std::size_t>(cfg_.dim), 0.0));
  }

  const TextClassifierConfig& config() const { return cfg_; }
  const ClassList& classes() const { return classes_; }
  std::size_t materializedRows() const { return rows_.size(); }

  /// Hashed feature buckets for an example under this model's configuration.
  std::vector<std::uint64_t> features(const PairExample& ex) const {
    std::vector<std::string> toks;
    if (cfg_.usePremise) {
      toks = tokenize(ex.premise).tokens;
      toks.emplace_back(kPremiseSeparator);
    }
    for (auto& t : tokenize(ex.hypothesis).tokens) toks.push_back(std::move(t));
    std::vector<std::uint64_t> buckets;
    for (const auto& f : extract_features(toks, cfg_.maxN))
      buckets.push_back(fnv1a64(f) % cfg_.bucketCount);
    return buckets;
  }

  Prediction predict(const PairExample& ex) const {
    return predict_buckets(features(ex));
  }

  Prediction predict_buckets(const std::vector<std::uint64_t>& buckets) const {
    const std::vector<double> hidden = hidden_of(buckets);
    Prediction p;
    p.probs = softmax(hidden);
    std::size_t best = 0;
    for (std::size_t j = 1; j < p.probs.size(); ++j)
      if (p.probs[j] > p.probs[best]) best = j;
    p.label = classes_[best];
    return p;
  }

  /// SGD on softmax cross-entropy with a linearly decaying learning rate.
  void train(const Dataset& train) {
    if (train.empty()) throw UsageError("training set is empty");
    std::vector<std::vector<std::uint64_t>> feats;
    std::vector<std::size_t> targets;
    feats.reserve(train.size());
    for (const auto& ex : train) {
      feats.push_back(features(ex));
      targets.push_back(class_index(ex.label));
    }
    const std::size_t dim = static_cast<std::size_t>(cfg_.dim);
    const double totalUpdates =
        static_cast<double>(cfg_.epochs) * static_cast<double>(train.size());
    double done = 0.0;
    Rng rng(derive_seed(cfg_.seed, 0x5348554646ull));
    std::vector<std::size_t> order(train.size());
    std::vector<double> grad(dim);
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      shuffle_in_place(order, rng);
      for (std::size_t idx : order) {
        const double lr = cfg_.learningRate * (1.0 - done / totalUpdates);
        done += 1.0;
        const auto& buckets = feats[idx];
        if (buckets.empty()) continue;
        const std::vector<double> hidden = hidden_of(buckets);
        const std::vector<double> probs = softmax(hidden);
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t j = 0; j < classes_.size(); ++j) {
          const double alpha = lr * ((j == targets[idx] ? 1.0 : 0.0) - probs[j]);
          auto& w = output_[j];
          for (std::size_t k = 0; k < dim; ++k) {
            grad[k] += alpha * w[k];
            w[k] += alpha * hidden[k];
          }
        }
        const double scale = 1.0 / static_cast<double>(buckets.size());
        for (std::uint64_t b : buckets) {
          auto& row = row_mut(b);
          for (std::size_t k = 0; k < dim; ++k) row[k] += grad[k] * scale;
        }
      }
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "artifactprobe-text-classifier";
    j["version"] = 1;
    j["config"] = {{"dim", cfg_.dim},
                   {"epochs", cfg_.epochs},
                   {"learningRate", cfg_.learningRate},
                   {"maxN", cfg_.maxN},
                   {"bucketCount", cfg_.bucketCount},
                   {"seed", cfg_.seed},
                   {"usePremise", cfg_.usePremise}};
    auto& cls = j["classes"] = nlohmann::json::array();
    for (Label l : classes_) cls.push_back(std::string(to_string(l)));
    j["output"] = output_;
    std::map<std::uint64_t, const std::vector<double>*> sorted;
    for (const auto& [b, row] : rows_) sorted.emplace(b, &row);
    auto& rows = j["rows"] = nlohmann::json::array();
    for (const auto& [b, row] : sorted) rows.push_back({{"bucket", b}, {"weights", *row}});
    return j;
  }

  static TextClassifier from_json(const nlohmann::json& j) {
    try {
      if (j.at("format") != "artifactprobe-text-classifier" || j.at("version") != 1)
        throw DataError("unsupported text classifier format");
      TextClassifierConfig c;
      const auto& jc = j.at("config");
      c.dim = jc.at("dim");
      c.epochs = jc.at("epochs");
      c.learningRate = jc.at("learningRate");
      c.maxN = jc.at("maxN");
      c.bucketCount = jc.at("bucketCount");
      c.seed = jc.at("seed");
      c.usePremise = jc.at("usePremise");
      ClassList classes;
      for (const auto& s : j.at("classes")) {
        auto l = parse_label(s.get<std::string>());
        if (!l) throw DataError("unknown class in model file");
        classes.push_back(*l);
      }
      TextClassifier m(c, classes);
      m.output_ = j.at("output").get<std::vector<std::vector<double>>>();
      if (m.output_.size() != classes.size()) throw DataError("output weight shape mismatch");
      for (const auto& w : m.output_)
        if (w.size() != static_cast<std::size_t>(c.dim))
          throw DataError("output weight shape mismatch");
      for (const auto& r : j.at("rows")) {
        auto w = r.at("weights").get<std::vector<double>>();
        if (w.size() != static_cast<std::size_t>(c.dim))
          throw DataError("input row shape mismatch");
        m.rows_.emplace(r.at("bucket").get<std::uint64_t>(), std::move(w));
      }
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed text classifier file: ") + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path.string());
    out << to_json().dump() << '\n';
  }

  static TextClassifier load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception&) {
      throw DataError("malformed text classifier file: " + path.string());
    }
    return from_json(j);
  }

 private:
  std::size_t class_index(Label l) const {
    for (std::size_t i = 0; i < classes_.size(); ++i)
      if (classes_[i] == l) return i;
    throw DataError("label " + std::string(to_string(l)) + " not in class list");
  }

  std::vector<double> init_row(std::uint64_t bucket) const {
    Rng rng(derive_seed(cfg_.seed, bucket));
    const double bound = 1.0 / cfg_.dim;
    std::vector<double> row(static_cast<std::size_t>(cfg_.dim));
    for (double& x : row) x = (2.0 * uniform_unit(rng) - 1.0) * bound;
    return row;
  }

  std::vector<double>& row_mut(std::uint64_t bucket) {
    auto it = rows_.find(bucket);
    if (it == rows_.end()) it = rows_.emplace(bucket, init_row(bucket)).first;
    return it->second;
  }

  std::vector<double> hidden_of(const std::vector<std::uint64_t>& buckets) const {
    const std::size_t dim = static_cast<std::size_t>(cfg_.dim);
    std::vector<double> h(dim, 0.0);
    if (buckets.empty()) return h;
    for (std::uint64_t b : buckets) {
      auto it = rows_.find(b);
      if (it != rows_.end()) {
        for (std::size_t k = 0; k < dim; ++k) h[k] += it->second[k];
      } else {
        const auto row = init_row(b);
        for (std::size_t k = 0; k < dim; ++k) h[k] += row[k];
      }
    }
    for (double& x : h) x /= static_cast<double>(buckets.size());
    return h;
  }

  std::vector<double> softmax(const std::vector<double>& hidden) const {
    std::vector<double> z(classes_.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < hidden.size(); ++k) s += output_[j][k] * hidden[k];
      z[j] = s;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) sum += (v = std::exp(v - mx));
    for (double& v : z) v /= sum;
    return z;
  }

  TextClassifierConfig cfg_;
  ClassList classes_;
  std::unordered_map<std::uint64_t, std::vector<double>> rows_;
  std::vector<std::vector<double>> output_;
};

inline TextClassifier train_text_classifier(const Dataset& train,
                                            const TextClassifierConfig& cfg = {}) {
  TextClassifier m(cfg);
  m.train(train);
  return m;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_TEXT_CLASSIFIER_HPP_
