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

#ifndef ARTIFACTPROBE_CORPUS_HPP_
#define ARTIFACTPROBE_CORPUS_HPP_

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "artifactprobe/common.hpp"

namespace artifactprobe {

struct PairExample {
  std::string id;
  std::string premise;
  std::string hypothesis;
  Label label = Label::entailment;
  Split split = Split::train;

  bool operator==(const PairExample&) const = default;
};

/// Ordered collection of examples with unique ids. Iteration is insertion
/// (file) order.
class Dataset {
 public:
  Dataset() = default;

  /// Throws DataError on an empty/duplicate id or an empty hypothesis.
  void add(PairExample ex) {
    if (ex.id.empty()) throw DataError("example with empty id");
    if (ex.hypothesis.empty())
      throw DataError("example '" + ex.id + "' has an empty hypothesis");
    if (index_.contains(ex.id))
      throw DataError("duplicate id '" + ex.id + "'");
    index_.emplace(ex.id, examples_.size());
    examples_.push_back(std::move(ex));
  }

  std::size_t size() const { return examples_.size(); }
  bool empty() const { return examples_.empty(); }
  const PairExample& operator[](std::size_t i) const { return examples_[i]; }
  auto begin() const { return examples_.begin(); }
  auto end() const { return examples_.end(); }
  const std::vector<PairExample>& examples() const { return examples_; }

  bool contains(const std::string& id) const { return index_.contains(id); }
  const PairExample* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &examples_[it->second];
  }

  /// Examples whose split tag is `s`, in order.
  Dataset filter(Split s) const {
    Dataset out;
    for (const auto& ex : examples_)
      if (ex.split == s) out.add(ex);
    return out;
  }

  bool operator==(const Dataset& o) const { return examples_ == o.examples_; }

 private:
  std::vector<PairExample> examples_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Record field names. Defaults follow the SNLI/MedNLI JSONL convention.
struct FieldMap {
  std::string premise = "sentence1";
  std::string hypothesis = "sentence2";
  std::string label = "gold_label";
  std::string id = "pairID";
};

namespace detail {

inline std::string trim_lower(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::string field_as_string(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  throw DataError("non-string field");
}

}  // namespace detail

/// Parses line-delimited JSON records. Blank lines are skipped; every other
/// line must be one object. Each example gets split tag `split`.
inline Dataset read_records(std::istream& in, Split split, const FieldMap& fields = {}) {
  Dataset d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw DataError("malformed record at line " + std::to_string(lineno));
    }
    if (!rec.is_object())
      throw DataError("malformed record at line " + std::to_string(lineno));

    auto get = [&](const std::string& key, const char* what) {
      auto it = rec.find(key);
      if (it == rec.end() || it->is_null())
        throw DataError(std::string("missing ") + what + " at line " +
                        std::to_string(lineno));
      try {
        return detail::field_as_string(*it);
      } catch (const DataError&) {
        throw DataError(std::string("malformed ") + what + " at line " +
                        std::to_string(lineno));
      }
    };

    PairExample ex;
    ex.id = get(fields.id, "id");
    ex.premise = get(fields.premise, "premise");
    ex.hypothesis = get(fields.hypothesis, "hypothesis");
    const std::string raw_label = get(fields.label, "label");
    const auto label = parse_label(detail::trim_lower(raw_label));
    if (!label)
      throw DataError("unknown label '" + raw_label + "' at line " +
                      std::to_string(lineno));
    ex.label = *label;
    ex.split = split;
    if (d.contains(ex.id))
      throw DataError("duplicate id '" + ex.id + "' at line " + std::to_string(lineno));
    if (ex.hypothesis.empty())
      throw DataError("empty hypothesis at line " + std::to_string(lineno));
    d.add(std::move(ex));
  }
  return d;
}

inline Dataset load_records(const std::filesystem::path& path, Split split,
                            const FieldMap& fields = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open records file: " + path.string());
  try {
    return read_records(in, split, fields);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

/// Writes records in the same JSONL layout `read_records` accepts.
inline void write_records(std::ostream& out, const Dataset& d, const FieldMap& fields = {}) {
  for (const auto& ex : d) {
    nlohmann::ordered_json rec;
    rec[fields.id] = ex.id;
    rec[fields.premise] = ex.premise;
    rec[fields.hypothesis] = ex.hypothesis;
    rec[fields.label] = std::string(to_string(ex.label));
    out << rec.dump() << '\n';
  }
}

inline void save_records(const std::filesystem::path& path, const Dataset& d,
                         const FieldMap& fields = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write records file: " + path.string());
  write_records(out, d, fields);
}

struct ValidationReport {
  std::size_t total = 0;
  std::array<std::size_t, kNumLabels> labelCounts{};
  std::array<std::size_t, 3> splitCounts{};
  std::array<double, kNumLabels> labelShares{};
  bool balanced = false;
  std::vector<std::string> warnings;
};

/// Per-label and per-split accounting. Balanced iff every label share is
/// within 0.01 of 1/3.
inline ValidationReport validate(const Dataset& d) {
  if (d.empty()) throw DataError("empty dataset");
  ValidationReport r;
  r.total = d.size();
  for (const auto& ex : d) {
    ++r.labelCounts[index_of(ex.label)];
    ++r.splitCounts[index_of(ex.split)];
  }
  r.balanced = true;
  for (Label l : kAllLabels) {
    const auto i = index_of(l);
    r.labelShares[i] = static_cast<double>(r.labelCounts[i]) / static_cast<double>(r.total);
    if (std::abs(r.labelShares[i] - 1.0 / 3.0) > 0.01) r.balanced = false;
    if (r.labelCounts[i] == 0)
      r.warnings.push_back("no examples with label " + std::string(to_string(l)));
  }
  if (!r.balanced) r.warnings.emplace_back("label distribution is not balanced");
  return r;
}

/// Concatenates three splits; examples keep their own split tags.
inline Dataset combine_splits(const Dataset& train, const Dataset& dev, const Dataset& test) {
  std::unordered_map<std::string, int> seen;
  std::vector<std::string> collisions;
  for (const Dataset* part : {&train, &dev, &test})
    for (const auto& ex : *part)
      if (++seen[ex.id] == 2) collisions.push_back(ex.id);
  if (!collisions.empty()) {
    std::ostringstream msg;
    msg << "id collision across splits:";
    for (const auto& id : collisions) msg << ' ' << id;
    throw DataError(msg.str());
  }
  Dataset out;
  for (const Dataset* part : {&train, &dev, &test})
    for (const auto& ex : *part) out.add(ex);
  return out;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_CORPUS_HPP_
