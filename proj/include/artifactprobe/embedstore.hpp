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

#ifndef ARTIFACTPROBE_EMBEDSTORE_HPP_
#define ARTIFACTPROBE_EMBEDSTORE_HPP_

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "artifactprobe/common.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

/// Pretrained word vectors, immutable once loaded.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw UsageError("embedding dim must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Inserts unless the token already exists; returns whether it was added.
  bool insert(const std::string& token, std::vector<float> v) {
    if (v.size() != dim_) throw UsageError("vector length differs from table dim");
    if (entries_.contains(token)) return false;
    order_.push_back(token);
    entries_.emplace(token, std::move(v));
    return true;
  }

  const std::vector<float>* find(const std::string& token) const {
    auto it = entries_.find(token);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Tokens in insertion order.
  const std::vector<std::string>& tokens() const { return order_; }

  std::vector<std::string> warnings;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<float>> entries_;
  std::vector<std::string> order_;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_uint(std::string_view s, std::size_t& v) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_float(std::string_view s, float& v) {
  // std::from_chars for float is not available on every toolchain we build on.
  std::string tmp(s);
  char* end = nullptr;
  v = std::strtof(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && !tmp.empty();
}

}  // namespace detail

/// Reads the word-vector text format: an optional "count dim" header, then
/// one "token v1 ... vdim" row per line.
inline EmbeddingTable read_vectors(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  EmbeddingTable table;
  bool initialized = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = detail::split_ws(line);
    if (fields.empty()) continue;
    if (!initialized) {
      std::size_t count = 0, hdim = 0;
      if (fields.size() == 2 && detail::parse_uint(fields[0], count) &&
          detail::parse_uint(fields[1], hdim)) {
        if (hdim == 0) throw DataError("dim mismatch line " + std::to_string(lineno));
        table = EmbeddingTable(hdim);
        dim = hdim;
        initialized = true;
        continue;
      }
      if (fields.size() < 2) throw DataError("dim mismatch line " + std::to_string(lineno));
      dim = fields.size() - 1;
      table = EmbeddingTable(dim);
      initialized = true;
    }
    if (fields.size() != dim + 1)
      throw DataError("dim mismatch line " + std::to_string(lineno));
    std::vector<float> v(dim);
    for (std::size_t k = 0; k < dim; ++k)
      if (!detail::parse_float(fields[k + 1], v[k]))
        throw DataError("bad number at line " + std::to_string(lineno));
    const std::string token(fields[0]);
    if (!table.insert(token, std::move(v)))
      table.warnings.push_back("duplicate token '" + token + "' at line " +
                               std::to_string(lineno) + " ignored");
  }
  if (!initialized || table.empty()) throw DataError("empty vector file");
  return table;
}

inline EmbeddingTable load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vector file: " + path.string());
  try {
    return read_vectors(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

/// Writes the table with a header line; floats in shortest round-trip form.
inline void write_vectors(std::ostream& out, const EmbeddingTable& t) {
  out << t.size() << ' ' << t.dim() << '\n';
  char buf[32];
  for (const auto& tok : t.tokens()) {
    out << tok;
    for (float x : *t.find(tok)) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(p - buf));
    }
    out << '\n';
  }
}

struct Embedded {
  std::vector<double> vector;
  double coverage = 0.0;
  bool emptyInput = false;
};

/// Mean of in-vocabulary token vectors. A merged token missing from the table
/// falls back to the mean of its underscore-separated parts; tokens with no
/// usable vector are skipped. Returns the zero vector when nothing is known.
inline Embedded embed_tokens(const TokenSeq& t, const EmbeddingTable& e) {
  if (e.empty()) throw UsageError("embedding table is empty");
  Embedded out;
  out.vector.assign(e.dim(), 0.0);
  if (t.empty()) {
    out.emptyInput = true;
    return out;
  }
  std::size_t known = 0;
  std::vector<double> part(e.dim());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (const auto* v = e.find(t.tokens[i])) {
      for (std::size_t k = 0; k < e.dim(); ++k) out.vector[k] += (*v)[k];
      ++known;
      continue;
    }
    if (!t.merged[i]) continue;
    std::fill(part.begin(), part.end(), 0.0);
    std::size_t parts = 0;
    std::string_view tok = t.tokens[i];
    std::size_t b = 0;
    while (b <= tok.size()) {
      std::size_t u = tok.find('_', b);
      if (u == std::string_view::npos) u = tok.size();
      if (const auto* v = e.find(std::string(tok.substr(b, u - b)))) {
        for (std::size_t k = 0; k < e.dim(); ++k) part[k] += (*v)[k];
        ++parts;
      }
      b = u + 1;
    }
    if (parts == 0) continue;
    for (std::size_t k = 0; k < e.dim(); ++k)
      out.vector[k] += part[k] / static_cast<double>(parts);
    ++known;
  }
  if (known > 0)
    for (double& x : out.vector) x /= static_cast<double>(known);
  out.coverage = static_cast<double>(known) / static_cast<double>(t.size());
  return out;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_EMBEDSTORE_HPP_
