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

#ifndef ARTIFACTPROBE_METRICS_HPP_
#define ARTIFACTPROBE_METRICS_HPP_

#include <algorithm>
#include <map>
#include <vector>

#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"

namespace artifactprobe {

using ClassList = std::vector<Label>;

inline ClassList default_class_list() { return {kAllLabels.begin(), kAllLabels.end()}; }

struct Metrics {
  ClassList classList;
  /// confusion[gold][predicted], indexed by position in classList.
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t total = 0;
  double microF1 = 0.0;
  std::map<Label, double> precision;
  std::map<Label, double> recall;
  /// Labels whose precision (resp. recall) had a zero denominator and was
  /// reported as 0.
  std::vector<Label> undefinedPrecision;
  std::vector<Label> undefinedRecall;
};

/// Metrics from an already-tallied confusion matrix (rows gold, columns
/// predicted).
inline Metrics metrics_from_confusion(std::vector<std::vector<std::size_t>> confusion,
                                      const ClassList& classList) {
  const std::size_t k = classList.size();
  if (confusion.size() != k)
    throw UsageError("confusion matrix size differs from class list");
  for (const auto& row : confusion)
    if (row.size() != k) throw UsageError("confusion matrix is not square");

  Metrics m;
  m.classList = classList;
  m.confusion = std::move(confusion);
  std::size_t trace = 0;
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t p = 0; p < k; ++p) {
      m.total += m.confusion[g][p];
      if (g == p) trace += m.confusion[g][p];
    }
  if (m.total == 0) throw UsageError("empty evaluation set");
  // Single-label multiclass: micro-averaged P = R = F1 = accuracy.
  m.microF1 = static_cast<double>(trace) / static_cast<double>(m.total);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t col = 0, row = 0;
    for (std::size_t j = 0; j < k; ++j) {
      col += m.confusion[j][c];
      row += m.confusion[c][j];
    }
    const double hit = static_cast<double>(m.confusion[c][c]);
    const Label l = classList[c];
    if (col == 0) {
      m.precision[l] = 0.0;
      m.undefinedPrecision.push_back(l);
    } else {
      m.precision[l] = hit / static_cast<double>(col);
    }
    if (row == 0) {
      m.recall[l] = 0.0;
      m.undefinedRecall.push_back(l);
    } else {
      m.recall[l] = hit / static_cast<double>(row);
    }
  }
  return m;
}

inline Metrics evaluate(const std::vector<Label>& predictions, const std::vector<Label>& gold,
                        const ClassList& classList = default_class_list()) {
  if (predictions.size() != gold.size())
    throw UsageError("predictions and gold labels differ in length");
  if (gold.empty()) throw UsageError("empty evaluation set");
  auto pos = [&](Label l) {
    auto it = std::find(classList.begin(), classList.end(), l);
    if (it == classList.end())
      throw UsageError("label " + std::string(to_string(l)) + " not in class list");
    return static_cast<std::size_t>(it - classList.begin());
  };
  std::vector<std::vector<std::size_t>> confusion(
      classList.size(), std::vector<std::size_t>(classList.size(), 0));
  for (std::size_t i = 0; i < gold.size(); ++i) ++confusion[pos(gold[i])][pos(predictions[i])];
  return metrics_from_confusion(std::move(confusion), classList);
}

/// Constant predictor of the most frequent training label.
struct MajorityClassifier {
  Label label = Label::entailment;
  Label predict(const PairExample&) const { return label; }
};

/// Ties are broken by label name in lexicographic order.
inline MajorityClassifier majority_baseline(const Dataset& train) {
  if (train.empty()) throw UsageError("majority baseline needs a nonempty training set");
  std::array<std::size_t, kNumLabels> counts{};
  for (const auto& ex : train) ++counts[index_of(ex.label)];
  std::vector<Label> order(kAllLabels.begin(), kAllLabels.end());
  std::sort(order.begin(), order.end(),
            [](Label a, Label b) { return to_string(a) < to_string(b); });
  Label best = order.front();
  for (Label l : order)
    if (counts[index_of(l)] > counts[index_of(best)]) best = l;
  return MajorityClassifier{best};
}

template <typename Classifier>
Metrics evaluate_on(const Classifier& model, const Dataset& eval,
                    const ClassList& classList = default_class_list()) {
  std::vector<Label> pred, gold;
  pred.reserve(eval.size());
  gold.reserve(eval.size());
  for (const auto& ex : eval) {
    if constexpr (requires { model.predict(ex).label; })
      pred.push_back(model.predict(ex).label);
    else
      pred.push_back(model.predict(ex));
    gold.push_back(ex.label);
  }
  return evaluate(pred, gold, classList);
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_METRICS_HPP_
