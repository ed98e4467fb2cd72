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

#ifndef ARTIFACTPROBE_COMMON_HPP_
#define ARTIFACTPROBE_COMMON_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace artifactprobe {

inline constexpr std::string_view kVersion = "1.0.0";

/// Bad input data: malformed files, validation failures, unknown ids.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller misuse: invalid parameters or option values.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Label : std::uint8_t { entailment = 0, neutral = 1, contradiction = 2 };
enum class Split : std::uint8_t { train = 0, dev = 1, test = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::entailment, Label::neutral, Label::contradiction};
inline constexpr std::array<Split, 3> kAllSplits = {Split::train, Split::dev,
                                                    Split::test};

inline constexpr std::string_view to_string(Label l) {
  switch (l) {
    case Label::entailment: return "entailment";
    case Label::neutral: return "neutral";
    case Label::contradiction: return "contradiction";
  }
  return "?";
}

inline constexpr std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "?";
}

inline std::optional<Label> parse_label(std::string_view s) {
  for (Label l : kAllLabels)
    if (to_string(l) == s) return l;
  return std::nullopt;
}

inline std::optional<Split> parse_split(std::string_view s) {
  for (Split sp : kAllSplits)
    if (to_string(sp) == s) return sp;
  return std::nullopt;
}

inline constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }
inline constexpr std::size_t index_of(Split s) { return static_cast<std::size_t>(s); }

// ---------------------------------------------------------------------------
// Seeded randomness. Everything stochastic in the toolkit draws from
// std::mt19937_64 (whose output sequence is fixed by the standard) through
// the helpers below, never through std::*_distribution, whose algorithms are
// implementation-defined. Same seed => same bytes on any conforming platform.
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
inline constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master) { return mix64(master); }

template <typename... Rest>
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t next,
                                    Rest... rest) {
  return derive_seed(mix64(master) ^ next, static_cast<std::uint64_t>(rest)...);
}

/// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller.
inline double standard_normal(Rng& rng) {
  double u1 = uniform_unit(rng);
  while (u1 <= 0.0) u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = uniform_below(rng, i);
    std::swap(v[i - 1], v[j]);
  }
}

/// `count` distinct indices from [0, n), in draw order (partial Fisher-Yates).
inline std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                           std::size_t count,
                                                           Rng& rng) {
  if (count > n) throw UsageError("sample size exceeds population");
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + uniform_below(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_COMMON_HPP_
