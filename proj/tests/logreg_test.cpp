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

#include "artifactprobe/logreg.hpp"

namespace ap = artifactprobe;
using ap::Label;

namespace {

std::vector<std::vector<double>> random_points(ap::Rng& rng, std::size_t n, std::size_t d) {
  std::vector<std::vector<double>> X(n, std::vector<double>(d));
  for (auto& row : X)
    for (double& v : row) v = ap::standard_normal(rng);
  return X;
}

// Best training accuracy of sign(cos(t) x + sin(t) y + b) over a grid of
// directions t and offsets b.
double grid_search_accuracy(const std::vector<std::vector<double>>& X,
                            const std::vector<Label>& y) {
  double best = 0.0;
  for (int a = 0; a < 720; ++a) {
    const double t = a * M_PI / 360.0;
    for (int bi = -60; bi <= 60; ++bi) {
      const double b = bi * 0.05;
      std::size_t right = 0;
      for (std::size_t i = 0; i < X.size(); ++i) {
        const bool pos = std::cos(t) * X[i][0] + std::sin(t) * X[i][1] + b > 0;
        right += pos == (y[i] == Label::entailment);
      }
      best = std::max(best, static_cast<double>(right) / static_cast<double>(X.size()));
    }
  }
  return best;
}

}  // namespace

TEST(LogRegObjective, GradientMatchesCentralDifferences) {
  ap::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + ap::uniform_below(rng, 6), d = 1 + ap::uniform_below(rng, 4);
    const auto X = ap::DenseMatrix::from_rows(random_points(rng, n, d));
    std::vector<std::size_t> y(n);
    for (auto& v : y) v = ap::uniform_below(rng, 3);
    std::vector<double> W(3 * (d + 1));
    for (double& w : W) w = ap::standard_normal(rng);
    const double l2 = 0.5 + ap::uniform_unit(rng);
    std::vector<double> grad;
    ap::logreg_objective(X, y, 3, W, l2, &grad);
    for (std::size_t j = 0; j < W.size(); ++j) {
      const double h = 1e-5;
      auto plus = W, minus = W;
      plus[j] += h;
      minus[j] -= h;
      const double fd = (ap::logreg_objective(X, y, 3, plus, l2, nullptr) -
                         ap::logreg_objective(X, y, 3, minus, l2, nullptr)) / (2 * h);
      EXPECT_LE(std::abs(fd - grad[j]), 1e-5 * std::max(1.0, std::abs(grad[j])));
    }
  }
}

TEST(LogReg, SeparablePointsMatchGridSearchOracle) {
  ap::Rng rng(23);
  std::vector<std::vector<double>> X;
  std::vector<Label> y;
  while (X.size() < 60) {
    const double a = 4 * ap::uniform_unit(rng) - 2, b = 4 * ap::uniform_unit(rng) - 2;
    const double margin = 0.8 * a - 0.6 * b + 0.3;
    if (std::abs(margin) < 0.3) continue;
    X.push_back({a, b});
    y.push_back(margin > 0 ? Label::entailment : Label::contradiction);
  }
  const double oracle = grid_search_accuracy(X, y);
  ASSERT_EQ(oracle, 1.0);
  ap::LogRegConfig cfg;
  cfg.l2Strength = 0.01;
  cfg.maxIters = 2000;
  const auto m = ap::train_logreg(X, y, cfg);
  std::size_t right = 0;
  for (std::size_t i = 0; i < X.size(); ++i) right += m.predict(X[i]) == y[i];
  EXPECT_EQ(static_cast<double>(right) / static_cast<double>(X.size()), oracle);
}

TEST(LogReg, SingleLabelPredictsItEverywhere) {
  ap::Rng rng(2);
  const auto X = random_points(rng, 30, 3);
  const auto m = ap::train_logreg(X, std::vector<Label>(30, Label::neutral));
  for (const auto& x : random_points(rng, 20, 3)) EXPECT_EQ(m.predict(x), Label::neutral);
}

TEST(LogReg, HugePenaltyShrinksTowardUniform) {
  ap::Rng rng(4);
  const auto X = random_points(rng, 90, 4);
  std::vector<Label> y;
  for (std::size_t i = 0; i < 90; ++i) y.push_back(ap::kAllLabels[i % 3]);
  ap::LogRegConfig cfg;
  cfg.l2Strength = 1e6;
  const auto m = ap::train_logreg(X, y, cfg);
  for (const auto& x : X)
    for (double p : m.probabilities(x)) EXPECT_NEAR(p, 1.0 / 3.0, 0.01);
}

TEST(LogReg, ConvergesToToleranceOnEasyProblem) {
  ap::Rng rng(8);
  const auto X = random_points(rng, 200, 5);
  std::vector<Label> y;
  for (const auto& x : X) y.push_back(x[0] > 0 ? Label::neutral : Label::contradiction);
  const auto m = ap::train_logreg(X, y);
  EXPECT_LT(m.iterations, 500);
  EXPECT_LT(m.finalGradNorm, 1e-4);
}

TEST(LogReg, DeterministicAndRoundTrips) {
  ap::Rng rng(6);
  const auto X = random_points(rng, 50, 3);
  std::vector<Label> y;
  for (const auto& x : X) y.push_back(x[1] > 0.2 ? Label::entailment : Label::neutral);
  const auto a = ap::train_logreg(X, y), b = ap::train_logreg(X, y);
  EXPECT_EQ(a.weights, b.weights);
  const auto back = ap::LogRegModel::from_json(nlohmann::json::parse(a.to_json().dump()));
  for (const auto& x : X) EXPECT_EQ(back.probabilities(x), a.probabilities(x));
}

TEST(LogReg, Errors) {
  EXPECT_THROW(ap::train_logreg(std::vector<std::vector<double>>{{1, 2}, {3}},
                                {Label::neutral, Label::neutral}),
               ap::UsageError);
  EXPECT_THROW(ap::train_logreg(std::vector<std::vector<double>>{{1}}, {}), ap::UsageError);
}
