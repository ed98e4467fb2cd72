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

#ifndef ARTIFACTPROBE_TEXTPROC_HPP_
#define ARTIFACTPROBE_TEXTPROC_HPP_

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "artifactprobe/common.hpp"

namespace artifactprobe {

/// Lowercase tokens; merged[i] is true when tokens[i] is an underscore-joined
/// gazetteer phrase.
struct TokenSeq {
  std::vector<std::string> tokens;
  std::vector<bool> merged;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  bool operator==(const TokenSeq&) const = default;
};

namespace detail {

inline bool is_edge_punct(char c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '"': case '\'':
      return true;
    default:
      return false;
  }
}

inline std::string join(const std::vector<std::string>& parts, std::size_t begin,
                        std::size_t end, char sep) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace detail

/// Lowercases and splits on whitespace. Leading and trailing marks from
/// .,;:!?()"' become their own tokens; internal punctuation stays attached
/// ("120/80", "x-ray", "patient's").
inline TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  auto emit = [&](std::string tok) {
    out.tokens.push_back(std::move(tok));
    out.merged.push_back(false);
  };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    std::string chunk(text.substr(i, j - i));
    for (char& c : chunk) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    std::size_t b = 0, e = chunk.size();
    std::vector<std::string> trailing;
    while (b < e && detail::is_edge_punct(chunk[b])) emit(std::string(1, chunk[b++]));
    while (e > b && detail::is_edge_punct(chunk[e - 1])) trailing.emplace_back(1, chunk[--e]);
    if (e > b) emit(chunk.substr(b, e - b));
    for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) emit(*it);
    i = j;
  }
  return out;
}

/// Multi-word surface forms used for entity merging. Phrases are stored as
/// their tokenized form joined by single spaces.
class Gazetteer {
 public:
  Gazetteer() = default;

  /// Adds a phrase; returns false (and stores nothing) for phrases with
  /// fewer than two tokens.
  bool add(std::string_view phrase) {
    const TokenSeq t = tokenize(phrase);
    if (t.size() < 2) return false;
    phrases_.insert(detail::join(t.tokens, 0, t.size(), ' '));
    maxLen_ = std::max(maxLen_, t.size());
    return true;
  }

  bool contains(const std::string& normalized) const { return phrases_.contains(normalized); }
  std::size_t size() const { return phrases_.size(); }
  bool empty() const { return phrases_.empty(); }
  std::size_t maxPhraseLen() const { return maxLen_; }

  std::vector<std::string> sorted_phrases() const {
    std::vector<std::string> v(phrases_.begin(), phrases_.end());
    std::sort(v.begin(), v.end());
    return v;
  }

 private:
  std::unordered_set<std::string> phrases_;
  std::size_t maxLen_ = 0;
};

/// One phrase per line; '#' lines and blank lines ignored. Single-token
/// lines cannot be merged and are skipped.
inline Gazetteer read_gazetteer(std::istream& in) {
  Gazetteer g;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    g.add(line);
  }
  return g;
}

inline Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gazetteer file: " + path.string());
  return read_gazetteer(in);
}

/// Greedy left-to-right longest-match replacement of gazetteer phrases by
/// underscore-joined tokens.
inline TokenSeq merge_entities(const TokenSeq& t, const Gazetteer& g) {
  if (g.empty()) return t;
  TokenSeq out;
  std::size_t i = 0;
  while (i < t.size()) {
    std::size_t matched = 0;
    const std::size_t longest = std::min(g.maxPhraseLen(), t.size() - i);
    for (std::size_t len = longest; len >= 2; --len) {
      if (g.contains(detail::join(t.tokens, i, i + len, ' '))) {
        matched = len;
        break;
      }
    }
    if (matched) {
      out.tokens.push_back(detail::join(t.tokens, i, i + matched, '_'));
      out.merged.push_back(true);
      i += matched;
    } else {
      out.tokens.push_back(t.tokens[i]);
      out.merged.push_back(t.merged[i]);
      ++i;
    }
  }
  return out;
}

/// All contiguous n-grams for n = 1..maxN, space-joined; unigrams first in
/// position order, then bigrams, and so on.
inline std::vector<std::string> extract_features(const std::vector<std::string>& tokens,
                                                 int maxN) {
  if (maxN < 1) throw UsageError("maxN must be >= 1");
  std::vector<std::string> out;
  for (std::size_t n = 1; n <= static_cast<std::size_t>(maxN); ++n) {
    if (n > tokens.size()) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
      out.push_back(detail::join(tokens, i, i + n, ' '));
  }
  return out;
}

inline std::vector<std::string> extract_features(const TokenSeq& t, int maxN) {
  return extract_features(t.tokens, maxN);
}

/// tokenize, then merge when a gazetteer is given.
inline TokenSeq preprocess(std::string_view text, const Gazetteer* g) {
  TokenSeq t = tokenize(text);
  return g ? merge_entities(t, *g) : t;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_TEXTPROC_HPP_
