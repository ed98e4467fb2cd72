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

#ifndef ARTIFACTPROBE_LOGREG_HPP_
#define ARTIFACTPROBE_LOGREG_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <json.hpp>

#include "artifactprobe/common.hpp"
#include "artifactprobe/metrics.hpp"

namespace artifactprobe {

/// Row-major dense matrix of doubles.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    DenseMatrix m;
    m.rows = rows.size();
    m.cols = rows.empty() ? 0 : rows.front().size();
    m.data.reserve(m.rows * m.cols);
    for (const auto& r : rows) {
      if (r.size() != m.cols) throw UsageError("inconsistent vector lengths");
      m.data.insert(m.data.end(), r.begin(), r.end());
    }
    return m;
  }
};

struct LogRegConfig {
  double l2Strength = 1.0;
  int maxIters = 500;
  double tolerance = 1e-4;
  /// Accepted for interface symmetry; optimization starts from zero weights
  /// and is deterministic without it.
  std::uint64_t seed = 0;
};

/// Multinomial logistic regression. Weights are numClasses x (dim + 1),
/// row-major, with the bias in the last column.
struct LogRegModel {
  ClassList classes;
  std::size_t dim = 0;
  std::vector<double> weights;
  int iterations = 0;
  double finalGradNorm = 0.0;

  std::vector<double> probabilities(std::span<const double> x) const {
    const std::size_t k = classes.size();
    std::vector<double> z(k);
    for (std::size_t c = 0; c < k; ++c) {
      const double* w = weights.data() + c * (dim + 1);
      double s = w[dim];
      for (std::size_t j = 0; j < dim; ++j) s += w[j] * x[j];
      z[c] = s;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) sum += (v = std::exp(v - mx));
    for (double& v : z) v /= sum;
    return z;
  }

  /// Ties go to the earliest class in `classes`.
  Label predict(std::span<const double> x) const {
    const auto p = probabilities(x);
    return classes[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["format"] = "artifactprobe-logreg";
    j["version"] = 1;
    auto& cls = j["classes"] = nlohmann::json::array();
    for (Label l : classes) cls.push_back(std::string(to_string(l)));
    j["dim"] = dim;
    j["weights"] = weights;
    return j;
  }

  static LogRegModel from_json(const nlohmann::json& j) {
    try {
      if (j.at("format") != "artifactprobe-logreg" || j.at("version") != 1)
        throw DataError("unsupported logistic regression format");
      LogRegModel m;
      for (const auto& s : j.at("classes")) {
        auto l = parse_label(s.get<std::string>());
        if (!l) throw DataError("unknown class in model file");
        m.classes.push_back(*l);
      }
      m.dim = j.at("dim");
      m.weights = j.at("weights").get<std::vector<double>>();
      if (m.weights.size() != m.classes.size() * (m.dim + 1))
        throw DataError("logistic regression weight shape mismatch");
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed logistic regression file: ") + e.what());
    }
  }
};

/// Mean penalized cross-entropy
///   J(W) = (1/N) [ sum_i -log p(y_i | x_i) + (l2/2) ||W_without_bias||^2 ]
/// with labels given as class indices. Writes dJ/dW into `grad` when non-null.
inline double logreg_objective(const DenseMatrix& X, std::span<const std::size_t> y,
                               std::size_t numClasses, std::span<const double> W,
                               double l2, std::vector<double>* grad) {
  const std::size_t n = X.rows, d = X.cols, stride = d + 1;
  if (grad) grad->assign(numClasses * stride, 0.0);
  std::vector<double> z(numClasses);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = X.row(i);
    for (std::size_t c = 0; c < numClasses; ++c) {
      const double* w = W.data() + c * stride;
      double s = w[d];
      for (std::size_t j = 0; j < d; ++j) s += w[j] * x[j];
      z[c] = s;
    }
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) sum += (v = std::exp(v - mx));
    loss -= std::log(z[y[i]] / sum);
    if (!grad) continue;
    for (std::size_t c = 0; c < numClasses; ++c) {
      const double r = z[c] / sum - (c == y[i] ? 1.0 : 0.0);
      double* g = grad->data() + c * stride;
      for (std::size_t j = 0; j < d; ++j) g[j] += r * x[j];
      g[d] += r;
    }
  }
  double penalty = 0.0;
  for (std::size_t c = 0; c < numClasses; ++c)
    for (std::size_t j = 0; j < d; ++j) {
      const double w = W[c * stride + j];
      penalty += w * w;
      if (grad) (*grad)[c * stride + j] += l2 * w;
    }
  const double inv = 1.0 / static_cast<double>(n);
  if (grad)
    for (double& g : *grad) g *= inv;
  return (loss + 0.5 * l2 * penalty) * inv;
}

/// Full-batch accelerated gradient descent (step 1/L from the Bohning bound,
/// momentum restarted whenever it opposes the gradient), stopping when the
/// gradient max-norm drops below cfg.tolerance or after cfg.maxIters steps.
inline LogRegModel train_logreg(const DenseMatrix& X, const std::vector<Label>& y,
                                const LogRegConfig& cfg = {},
                                const ClassList& classes = default_class_list()) {
  if (X.rows == 0 || X.rows != y.size())
    throw UsageError("logistic regression needs |X| = |y| > 0");
  if (X.data.size() != X.rows * X.cols) throw UsageError("inconsistent vector lengths");
  if (cfg.l2Strength < 0) throw UsageError("l2Strength must be >= 0");

  std::vector<std::size_t> yi(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto it = std::find(classes.begin(), classes.end(), y[i]);
    if (it == classes.end()) throw UsageError("label not in class list");
    yi[i] = static_cast<std::size_t>(it - classes.begin());
  }

  const std::size_t n = X.rows, d = X.cols, k = classes.size();
  double meanSq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 1.0;
    for (double v : X.row(i)) s += v * v;
    meanSq += s;
  }
  meanSq /= static_cast<double>(n);
  const double lipschitz = 0.5 * meanSq + cfg.l2Strength / static_cast<double>(n);
  const double step = 1.0 / lipschitz;

  std::vector<double> x(k * (d + 1), 0.0), xPrev = x, look = x, grad;
  double t = 1.0;
  LogRegModel m;
  m.classes = classes;
  m.dim = d;
  int it = 0;
  double gnorm = 0.0;
  for (; it < cfg.maxIters; ++it) {
    logreg_objective(X, yi, k, look, cfg.l2Strength, &grad);
    gnorm = 0.0;
    for (double g : grad) gnorm = std::max(gnorm, std::abs(g));
    if (gnorm < cfg.tolerance) {
      x = look;
      break;
    }
    xPrev = x;
    double align = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      x[j] = look[j] - step * grad[j];
      align += grad[j] * (x[j] - xPrev[j]);
    }
    if (align > 0.0) t = 1.0;
    const double tNext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / tNext;
    for (std::size_t j = 0; j < x.size(); ++j) look[j] = x[j] + beta * (x[j] - xPrev[j]);
    t = tNext;
  }
  m.weights = std::move(x);
  m.iterations = it;
  m.finalGradNorm = gnorm;
  return m;
}

inline LogRegModel train_logreg(const std::vector<std::vector<double>>& X,
                                const std::vector<Label>& y, const LogRegConfig& cfg = {},
                                const ClassList& classes = default_class_list()) {
  return train_logreg(DenseMatrix::from_rows(X), y, cfg, classes);
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_LOGREG_HPP_
