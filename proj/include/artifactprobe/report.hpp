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

#ifndef ARTIFACTPROBE_REPORT_HPP_
#define ARTIFACTPROBE_REPORT_HPP_

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "artifactprobe/aflite.hpp"
#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/heuristics.hpp"
#include "artifactprobe/lexstats.hpp"
#include "artifactprobe/metrics.hpp"

namespace artifactprobe {

struct Table {
  std::string caption;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Section {
  std::string key;
  std::string title;
  bool ran = false;
  std::vector<std::string> notes;
  std::vector<Table> tables;
};

/// Rendered analysis output. Cells are preformatted strings so every render
/// format shows identical numbers.
struct Report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<Section> sections;

  Section& section(const std::string& key) {
    for (auto& s : sections)
      if (s.key == key) return s;
    throw UsageError("unknown report section '" + key + "'");
  }
  const Section* find(const std::string& key) const {
    for (const auto& s : sections)
      if (s.key == key) return &s;
    return nullptr;
  }
};

/// An empty report with the standard sections, all marked not run.
inline Report make_report() {
  Report r;
  r.sections = {
      {"validation", "Dataset validation", false, {}, {}},
      {"baselines", "Micro-F1 of majority-class and probe classifiers", false, {}, {}},
      {"confusion", "Probe confusion matrix (test, rows = gold)", false, {}, {}},
      {"pmi", "Top tokens by PMI(token, class)", false, {}, {}},
      {"lengths", "Hypothesis length by class and entity representation", false, {}, {}},
      {"heuristics", "Chi-square uniformity test by heuristic", false, {}, {}},
      {"partitions", "Micro-F1 by partition (full, easy, difficult)", false, {}, {}},
  };
  return r;
}

// Fixed output precision: micro-F1 two decimals, PMI three, chi-square two,
// p-values scientific.
inline std::string fmt_fixed(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}
inline std::string fmt_f1(double v) { return fmt_fixed(v, 2); }
inline std::string fmt_pmi(double v) { return fmt_fixed(v, 3); }
inline std::string fmt_chi(double v) { return fmt_fixed(v, 2); }
inline std::string fmt_percent(double fraction) { return fmt_fixed(100.0 * fraction, 2) + "%"; }
inline std::string fmt_p(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}
inline std::string fmt_delta(double v) {
  std::string s = fmt_fixed(v, 2);
  if (s == "-0.00") s = "0.00";
  return (v >= 0 || s == "0.00") ? "+" + s : s;
}

inline void fill_validation(Section& s, const ValidationReport& v) {
  s.ran = true;
  Table t{"", {"label", "count", "share"}, {}};
  for (Label l : kAllLabels)
    t.rows.push_back({std::string(to_string(l)), std::to_string(v.labelCounts[index_of(l)]),
                      fmt_percent(v.labelShares[index_of(l)])});
  t.rows.push_back({"total", std::to_string(v.total), "100.00%"});
  Table sp{"", {"split", "count"}, {}};
  for (Split x : kAllSplits)
    sp.rows.push_back({std::string(to_string(x)), std::to_string(v.splitCounts[index_of(x)])});
  s.tables = {std::move(t), std::move(sp)};
  s.notes.push_back(std::string("balanced: ") + (v.balanced ? "yes" : "no"));
  for (const auto& w : v.warnings) s.notes.push_back("warning: " + w);
}

/// Majority and probe micro-F1 on dev and test for one input variant.
struct BaselineScores {
  std::string variant;
  Label majorityLabel = Label::entailment;
  std::optional<double> majorityDev, majorityTest, probeDev, probeTest;
};

inline void fill_baselines(Section& s, const std::vector<BaselineScores>& variants) {
  s.ran = true;
  auto cell = [](const std::optional<double>& v) { return v ? fmt_f1(*v) : std::string("n/a"); };
  for (const auto& v : variants) {
    Table t{v.variant, {"model", "dev", "test"}, {}};
    t.rows.push_back({"majority class (" + std::string(to_string(v.majorityLabel)) + ")",
                      cell(v.majorityDev), cell(v.majorityTest)});
    t.rows.push_back({"probe", cell(v.probeDev), cell(v.probeTest)});
    s.tables.push_back(std::move(t));
  }
}

inline void fill_confusion(Section& s, const Metrics& m) {
  s.ran = true;
  Table c{"", {"gold \\ predicted"}, {}};
  for (Label l : m.classList) c.header.emplace_back(to_string(l));
  for (std::size_t g = 0; g < m.classList.size(); ++g) {
    std::vector<std::string> row{std::string(to_string(m.classList[g]))};
    for (std::size_t p = 0; p < m.classList.size(); ++p) row.push_back(std::to_string(m.confusion[g][p]));
    c.rows.push_back(std::move(row));
  }
  Table pr{"per-class precision and recall", {"class", "precision", "recall"}, {}};
  for (Label l : m.classList)
    pr.rows.push_back({std::string(to_string(l)), fmt_fixed(100.0 * m.precision.at(l), 1),
                       fmt_fixed(100.0 * m.recall.at(l), 1)});
  s.tables = {std::move(c), std::move(pr)};
  s.notes.push_back("micro-F1: " + fmt_f1(m.microF1) + " over " + std::to_string(m.total) +
                    " examples");
  for (Label l : m.undefinedPrecision)
    s.notes.push_back("precision undefined (0/0) for " + std::string(to_string(l)));
  for (Label l : m.undefinedRecall)
    s.notes.push_back("recall undefined (0/0) for " + std::string(to_string(l)));
}

inline void fill_pmi(Section& s, const PmiTable& p, std::size_t topN) {
  s.ran = true;
  Table t{"", {"rank"}, {}};
  std::vector<std::vector<RankedToken>> cols;
  for (const auto& c : p.classes) {
    t.header.push_back(c);
    t.header.push_back("pmi");
    t.header.push_back("%");
    cols.push_back(top_tokens(p, c, topN));
  }
  std::size_t rows = 0;
  for (const auto& c : cols) rows = std::max(rows, c.size());
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::string> row{std::to_string(r + 1)};
    for (const auto& c : cols) {
      if (r < c.size()) {
        row.push_back(c[r].token);
        row.push_back(fmt_pmi(c[r].pmi));
        row.push_back(fmt_percent(c[r].classDocFraction));
      } else {
        row.insert(row.end(), {"", "", ""});
      }
    }
    t.rows.push_back(std::move(row));
  }
  s.tables = {std::move(t)};
  s.notes.push_back("smoothing: add-" + fmt_fixed(p.smoothing, 0) + ", min count: " +
                    std::to_string(p.minCount) + ", vocabulary: " +
                    std::to_string(p.entries.size()));
}

inline void fill_lengths(Section& s, const LengthStats& separate, const LengthStats& merged) {
  s.ran = true;
  Table t{"", {"representation"}, {}};
  for (Label l : kAllLabels) {
    t.header.push_back(std::string(to_string(l)) + " mean");
    t.header.push_back(std::string(to_string(l)) + " median");
  }
  for (const auto* ls : {&separate, &merged}) {
    std::vector<std::string> row{ls->entityMode == EntityMode::merged ? "merged" : "separate"};
    for (const auto& c : ls->perClass) {
      row.push_back(fmt_fixed(c.mean, 1));
      row.push_back(fmt_fixed(c.median, 1));
    }
    t.rows.push_back(std::move(row));
  }
  s.tables = {std::move(t)};
}

inline void fill_heuristics(Section& s, const HeuristicReport& h) {
  s.ran = true;
  Table t{"", {"heuristic", "pairs", "entailment", "neutral", "contradiction", "chi2", "df",
               "p-value", "top class"},
          {}};
  for (const auto& r : h.results) {
    std::vector<std::string> row{std::string(to_string(r.kind)), std::to_string(r.satisfyingCount)};
    for (auto c : r.perClassCounts) row.push_back(std::to_string(c));
    if (r.applicable) {
      row.push_back(fmt_chi(r.chi->stat));
      row.push_back(std::to_string(r.chi->df));
      row.push_back(fmt_p(r.chi->pValue));
      row.push_back(std::string(to_string(r.topClass)) + " (" + fmt_fixed(100.0 * r.topClassShare, 1) + "%)");
    } else {
      row.insert(row.end(), {"inapplicable", "", "", ""});
    }
    t.rows.push_back(std::move(row));
  }
  s.tables = {std::move(t)};
}

/// One partition-table row: a model/eval-split pair scored on full, easy and
/// difficult subsets.
struct PartitionRow {
  std::string variant;
  std::string model;
  std::string evalSplit;
  std::optional<double> full, easy, difficult;
};

inline void fill_partitions(Section& s, const std::vector<PartitionRow>& rows,
                        const std::vector<std::string>& notes) {
  s.ran = true;
  Table t{"", {"input", "model", "eval dataset", "full", "easy (delta)", "difficult (delta)"}, {}};
  auto with_delta = [](const std::optional<double>& v, const std::optional<double>& full) {
    if (!v) return std::string("n/a");
    std::string c = fmt_f1(*v);
    if (full) c += " (" + fmt_delta(*v - *full) + ")";
    return c;
  };
  for (const auto& r : rows)
    t.rows.push_back({r.variant, r.model, r.evalSplit, r.full ? fmt_f1(*r.full) : "n/a",
                      with_delta(r.easy, r.full), with_delta(r.difficult, r.full)});
  s.tables = {std::move(t)};
  s.notes.insert(s.notes.end(), notes.begin(), notes.end());
}

enum class RenderFormat { text, delimited, markdown };

inline RenderFormat parse_render_format(std::string_view s) {
  if (s == "text") return RenderFormat::text;
  if (s == "delimited" || s == "tsv") return RenderFormat::delimited;
  if (s == "markdown" || s == "md") return RenderFormat::markdown;
  throw UsageError("unknown format '" + std::string(s) + "'");
}

inline std::string_view file_extension(RenderFormat f) {
  switch (f) {
    case RenderFormat::text: return ".txt";
    case RenderFormat::delimited: return ".tsv";
    case RenderFormat::markdown: return ".md";
  }
  return ".txt";
}

namespace detail {

inline void render_text_table(std::ostream& out, const Table& t) {
  std::vector<std::size_t> w(t.header.size(), 0);
  auto widen = [&](const std::vector<std::string>& row) {
    if (row.size() > w.size()) w.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) w[i] = std::max(w[i], row[i].size());
  };
  widen(t.header);
  for (const auto& r : t.rows) widen(r);
  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += "  ";
      s += row[i];
      if (i + 1 < row.size()) s.append(w[i] - row[i].size(), ' ');
    }
    while (!s.empty() && s.back() == ' ') s.pop_back();
    out << s << '\n';
  };
  if (!t.caption.empty()) out << t.caption << '\n';
  line(t.header);
  std::size_t total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) total += w[i] + (i ? 2 : 0);
  out << std::string(total, '-') << '\n';
  for (const auto& r : t.rows) line(r);
}

inline std::string md_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '|' || c == '_' || c == '*') o += '\\';
    o += c;
  }
  return o;
}

}  // namespace detail

/// Deterministic rendering: same report in, same bytes out.
inline std::string render(const Report& r, RenderFormat f) {
  std::ostringstream out;
  switch (f) {
    case RenderFormat::text:
      out << "artifactprobe report\n";
      for (const auto& [k, v] : r.meta) out << "  " << k << ": " << v << '\n';
      for (const auto& s : r.sections) {
        out << "\n== " << s.title << " ==\n";
        if (!s.ran) {
          out << "(not run)\n";
          continue;
        }
        for (const auto& n : s.notes) out << "note: " << n << '\n';
        for (std::size_t i = 0; i < s.tables.size(); ++i) {
          if (i) out << '\n';
          detail::render_text_table(out, s.tables[i]);
        }
      }
      break;
    case RenderFormat::delimited:
      for (const auto& [k, v] : r.meta) out << "#meta\t" << k << '\t' << v << '\n';
      for (const auto& s : r.sections) {
        out << "#section\t" << s.key << '\t' << (s.ran ? "ok" : "not run") << '\n';
        for (const auto& n : s.notes) out << "#note\t" << n << '\n';
        for (const auto& t : s.tables) {
          if (!t.caption.empty()) out << "#table\t" << t.caption << '\n';
          auto row = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "\t" : "") << cells[i];
            out << '\n';
          };
          row(t.header);
          for (const auto& rr : t.rows) row(rr);
        }
      }
      break;
    case RenderFormat::markdown:
      out << "# artifactprobe report\n\n";
      for (const auto& [k, v] : r.meta) out << "- **" << k << "**: " << detail::md_escape(v) << '\n';
      for (const auto& s : r.sections) {
        out << "\n## " << s.title << "\n\n";
        if (!s.ran) {
          out << "_not run_\n";
          continue;
        }
        for (const auto& n : s.notes) out << "> " << detail::md_escape(n) << "\n";
        if (!s.notes.empty()) out << '\n';
        for (const auto& t : s.tables) {
          if (!t.caption.empty()) out << "**" << detail::md_escape(t.caption) << "**\n\n";
          auto row = [&](const std::vector<std::string>& cells) {
            out << '|';
            for (const auto& c : cells) out << ' ' << detail::md_escape(c) << " |";
            out << '\n';
          };
          row(t.header);
          out << '|';
          for (std::size_t i = 0; i < t.header.size(); ++i) out << " --- |";
          out << '\n';
          for (const auto& rr : t.rows) row(rr);
          out << '\n';
        }
      }
      break;
  }
  return out.str();
}

/// Writes `<dir>/<stem><ext>` and returns the path.
inline std::filesystem::path render_to_file(const Report& r, RenderFormat f,
                                            const std::filesystem::path& dir,
                                            const std::string& stem = "report") {
  std::filesystem::create_directories(dir);
  const auto path = dir / (stem + std::string(file_extension(f)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write report: " + path.string());
  out << render(r, f);
  return path;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_REPORT_HPP_
