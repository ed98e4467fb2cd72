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

#ifndef ARTIFACTPROBE_CHISQUARE_HPP_
#define ARTIFACTPROBE_CHISQUARE_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "artifactprobe/common.hpp"

namespace artifactprobe {

namespace detail {

// P(a, x) by its power series; converges quickly for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term, ap = a;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); for x >= a + 1.
inline double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
/// Series for x < a + 1, continued fraction otherwise.
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw UsageError("regularized_gamma_q needs a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_continued_fraction(a, x);
}

/// Upper tail of the chi-square distribution with `df` degrees of freedom.
inline double chi_square_sf(double stat, double df) {
  if (stat <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * stat);
}

struct ChiSquareResult {
  double stat = 0.0;
  int df = 0;
  double pValue = 1.0;
};

/// Goodness-of-fit against equal expected counts.
inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (counts.size() < 2 || total == 0) throw DataError("test inapplicable");
  // sum (O - E)^2 / E with E = N/k equals (k * sum O^2 - N^2) / N; the
  // numerator is exact in 128-bit integers, so only one rounding remains.
  unsigned __int128 sumSq = 0;
  for (auto c : counts) sumSq += static_cast<unsigned __int128>(c) * c;
  const unsigned __int128 n = total;
  ChiSquareResult r;
  r.stat = static_cast<double>(counts.size() * sumSq - n * n) / static_cast<double>(total);
  r.df = static_cast<int>(counts.size()) - 1;
  // Q(1, x) = exp(-x), exact for two degrees of freedom.
  r.pValue = r.df == 2 ? std::exp(-0.5 * r.stat) : chi_square_sf(r.stat, r.df);
  return r;
}

inline ChiSquareResult chi_square_uniform(const std::vector<std::uint64_t>& counts) {
  return chi_square_uniform(std::span<const std::uint64_t>(counts));
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_CHISQUARE_HPP_
