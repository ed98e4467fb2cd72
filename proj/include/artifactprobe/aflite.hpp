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

#ifndef ARTIFACTPROBE_AFLITE_HPP_
#define ARTIFACTPROBE_AFLITE_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "artifactprobe/common.hpp"
#include "artifactprobe/corpus.hpp"
#include "artifactprobe/embedstore.hpp"
#include "artifactprobe/logreg.hpp"
#include "artifactprobe/textproc.hpp"

namespace artifactprobe {

struct AfliteParams {
  int ensembleSize = 64;         // n
  std::size_t trainSize = 5620;  // m
  std::size_t cutoff = 500;      // k
  double threshold = 0.75;       // tau
  std::uint64_t seed = 0;
  /// score > tau instead of the default score >= tau.
  bool strictThreshold = false;
  LogRegConfig logreg{};

  void check() const {
    if (ensembleSize < 1) throw UsageError("ensemble size must be >= 1");
    if (trainSize < 1) throw UsageError("train size must be >= 1");
    if (cutoff < 1) throw UsageError("cutoff must be >= 1");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw UsageError("threshold must be in (0, 1]");
  }
};

enum class RepresentationKind { hypothesisOnly, premisePlusHypothesis };

inline constexpr std::string_view to_string(RepresentationKind k) {
  return k == RepresentationKind::hypothesisOnly ? "hypothesis_only" : "premise_plus_hypothesis";
}

inline RepresentationKind parse_representation(std::string_view s) {
  if (s == "hypothesis_only") return RepresentationKind::hypothesisOnly;
  if (s == "premise_plus_hypothesis") return RepresentationKind::premisePlusHypothesis;
  throw UsageError("unknown representation '" + std::string(s) + "'");
}

struct Representation {
  RepresentationKind kind = RepresentationKind::hypothesisOnly;
  bool mergedEntities = true;
  bool operator==(const Representation&) const = default;
};

/// Feature rows aligned with ids, labels and split tags.
struct AfliteInput {
  std::vector<std::string> ids;
  DenseMatrix features;
  std::vector<Label> labels;
  std::vector<Split> splits;
  Representation representation;
  double meanCoverage = 0.0;
};

/// Averaged-embedding features for every example. Premise+hypothesis
/// concatenates both (merged) token sequences before averaging.
inline AfliteInput build_representation(const Dataset& d, const EmbeddingTable& table,
                                        const Gazetteer* gazetteer, RepresentationKind kind) {
  AfliteInput in;
  in.representation = {kind, gazetteer != nullptr};
  in.features = DenseMatrix(d.size(), table.dim());
  double coverage = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& ex = d[i];
    TokenSeq toks;
    if (kind == RepresentationKind::premisePlusHypothesis) toks = preprocess(ex.premise, gazetteer);
    const TokenSeq h = preprocess(ex.hypothesis, gazetteer);
    toks.tokens.insert(toks.tokens.end(), h.tokens.begin(), h.tokens.end());
    toks.merged.insert(toks.merged.end(), h.merged.begin(), h.merged.end());
    const Embedded e = embed_tokens(toks, table);
    std::copy(e.vector.begin(), e.vector.end(), in.features.row(i).begin());
    coverage += e.coverage;
    in.ids.push_back(ex.id);
    in.labels.push_back(ex.label);
    in.splits.push_back(ex.split);
  }
  in.meanCoverage = d.empty() ? 0.0 : coverage / static_cast<double>(d.size());
  return in;
}

struct InstanceScore {
  std::string exampleId;
  std::size_t correctCount = 0;
  std::size_t appearanceCount = 0;
  double score = 0.0;
};

/// One ensemble member's evaluation: which ids it saw and whether it got
/// each right.
struct ModelRecord {
  std::vector<std::string> evalIds;
  std::vector<bool> correct;
};

/// Aggregates correctness across models; score = correct / appearances.
inline std::unordered_map<std::string, InstanceScore> score_instances(
    const std::vector<ModelRecord>& records) {
  std::unordered_map<std::string, InstanceScore> out;
  for (const auto& r : records) {
    if (r.evalIds.size() != r.correct.size())
      throw UsageError("correctness flags not aligned with ids");
    for (std::size_t i = 0; i < r.evalIds.size(); ++i) {
      auto& s = out[r.evalIds[i]];
      s.exampleId = r.evalIds[i];
      ++s.appearanceCount;
      if (r.correct[i]) ++s.correctCount;
    }
  }
  for (auto& [id, s] : out)
    s.score = s.appearanceCount ? static_cast<double>(s.correctCount) /
                                      static_cast<double>(s.appearanceCount)
                                : 0.0;
  return out;
}

struct IdTag {
  std::string id;
  Split split = Split::train;
  bool operator==(const IdTag&) const = default;
};

struct IterationRecord {
  std::size_t retainedBefore = 0;
  std::size_t removed = 0;
};

/// AFLite output. Holds ids and run metadata only, never sentence text.
struct PartitionManifest {
  AfliteParams params;
  Representation representation;
  std::vector<IterationRecord> iterations;
  std::vector<IdTag> easy;
  std::vector<IdTag> difficult;
  std::string checksum;
};

namespace detail {

inline std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

inline std::vector<std::string> sorted_ids(const std::vector<IdTag>& tags) {
  std::vector<std::string> ids;
  ids.reserve(tags.size());
  for (const auto& t : tags) ids.push_back(t.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline void sort_tags(std::vector<IdTag>& tags) {
  std::sort(tags.begin(), tags.end(),
            [](const IdTag& a, const IdTag& b) { return a.id < b.id; });
}

}  // namespace detail

/// SHA-256 (lowercase hex) over the sorted easy ids joined by "\n", then
/// "\n--\n", then the sorted difficult ids joined by "\n".
inline std::string manifest_checksum(const PartitionManifest& m) {
  std::string payload;
  auto append = [&](const std::vector<std::string>& ids) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) payload += '\n';
      payload += ids[i];
    }
  };
  append(detail::sorted_ids(m.easy));
  payload += "\n--\n";
  append(detail::sorted_ids(m.difficult));
  return detail::sha256_hex(payload);
}

struct AfliteRunOptions {
  /// Worker threads for the ensemble; results do not depend on it.
  unsigned threads = 1;
};

/// Iterative adversarial filtering. Each round trains `ensembleSize`
/// logistic regressions on independent uniform m-subsets of the retained
/// set, scores every other retained instance by its held-out accuracy, and
/// moves the top-k instances scoring at least tau (score desc, id asc) to
/// the easy partition. Stops when fewer than m instances remain or fewer
/// than k are removed; whatever is retained is the difficult partition.
inline PartitionManifest run_aflite(const AfliteInput& in, const AfliteParams& p,
                                    const AfliteRunOptions& opt = {}) {
  p.check();
  const std::size_t n = in.ids.size();
  if (n < 1) throw UsageError("AFLite needs at least one instance");
  if (in.features.rows != n || in.labels.size() != n || in.splits.size() != n)
    throw UsageError("AFLite inputs differ in length");
  if (in.features.data.size() != n * in.features.cols) throw UsageError("dimension mismatch");

  PartitionManifest m;
  m.params = p;
  m.representation = in.representation;

  std::vector<std::size_t> retained(n);
  for (std::size_t i = 0; i < n; ++i) retained[i] = i;
  std::vector<bool> isEasy(n, false);
  const std::size_t models = static_cast<std::size_t>(p.ensembleSize);
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(models)));

  for (std::uint64_t iter = 0; retained.size() >= p.trainSize; ++iter) {
    std::vector<ModelRecord> records(models);
    auto job = [&](std::size_t model) {
      Rng rng(derive_seed(p.seed, iter, model));
      const auto pick = sample_without_replacement(retained.size(), p.trainSize, rng);
      std::vector<bool> inTrain(retained.size(), false);
      DenseMatrix X(p.trainSize, in.features.cols);
      std::vector<Label> y(p.trainSize);
      for (std::size_t r = 0; r < pick.size(); ++r) {
        inTrain[pick[r]] = true;
        const std::size_t src = retained[pick[r]];
        std::copy_n(in.features.row(src).begin(), in.features.cols, X.row(r).begin());
        y[r] = in.labels[src];
      }
      const LogRegModel model_fit = train_logreg(X, y, p.logreg);
      ModelRecord rec;
      for (std::size_t r = 0; r < retained.size(); ++r) {
        if (inTrain[r]) continue;
        const std::size_t src = retained[r];
        rec.evalIds.push_back(in.ids[src]);
        rec.correct.push_back(model_fit.predict(in.features.row(src)) == in.labels[src]);
      }
      records[model] = std::move(rec);
    };
    if (workers == 1) {
      for (std::size_t i = 0; i < models; ++i) job(i);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < models; i += workers) job(i);
        });
    }

    const auto scores = score_instances(records);
    struct Candidate {
      std::size_t index;
      double score;
    };
    std::vector<Candidate> candidates;
    for (std::size_t src : retained) {
      auto it = scores.find(in.ids[src]);
      const double s = it == scores.end() ? 0.0 : it->second.score;
      if (p.strictThreshold ? s > p.threshold : s >= p.threshold) candidates.push_back({src, s});
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      return in.ids[a.index] < in.ids[b.index];
    });
    const std::size_t take = std::min(p.cutoff, candidates.size());
    for (std::size_t i = 0; i < take; ++i) isEasy[candidates[i].index] = true;
    m.iterations.push_back({retained.size(), take});
    std::erase_if(retained, [&](std::size_t i) { return isEasy[i]; });
    if (take < p.cutoff) break;
  }

  for (std::size_t i = 0; i < n; ++i)
    (isEasy[i] ? m.easy : m.difficult).push_back({in.ids[i], in.splits[i]});
  detail::sort_tags(m.easy);
  detail::sort_tags(m.difficult);
  m.checksum = manifest_checksum(m);
  return m;
}

inline constexpr std::string_view kManifestSchema = "artifactprobe.partition-manifest";
inline constexpr int kManifestVersion = 1;

inline nlohmann::ordered_json manifest_to_json(const PartitionManifest& m) {
  nlohmann::ordered_json j;
  j["schema"] = kManifestSchema;
  j["version"] = kManifestVersion;
  j["params"] = {{"ensemble_size", m.params.ensembleSize},
                 {"train_size", m.params.trainSize},
                 {"cutoff", m.params.cutoff},
                 {"threshold", m.params.threshold},
                 {"strict_threshold", m.params.strictThreshold},
                 {"seed", m.params.seed},
                 {"l2_strength", m.params.logreg.l2Strength},
                 {"max_iters", m.params.logreg.maxIters},
                 {"tolerance", m.params.logreg.tolerance}};
  j["representation"] = {{"kind", to_string(m.representation.kind)},
                         {"merged_entities", m.representation.mergedEntities}};
  auto& its = j["iterations"] = nlohmann::ordered_json::array();
  for (const auto& it : m.iterations)
    its.push_back({{"retained_before", it.retainedBefore}, {"removed", it.removed}});
  auto tags = [](const std::vector<IdTag>& v) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& t : v) a.push_back({{"id", t.id}, {"split", to_string(t.split)}});
    return a;
  };
  j["easy"] = tags(m.easy);
  j["difficult"] = tags(m.difficult);
  j["checksum"] = m.checksum;
  return j;
}

inline PartitionManifest manifest_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema") != kManifestSchema) throw DataError("not a partition manifest");
    if (j.at("version") != kManifestVersion)
      throw DataError("unsupported manifest version " + j.at("version").dump());
    PartitionManifest m;
    const auto& p = j.at("params");
    m.params.ensembleSize = p.at("ensemble_size");
    m.params.trainSize = p.at("train_size");
    m.params.cutoff = p.at("cutoff");
    m.params.threshold = p.at("threshold");
    m.params.strictThreshold = p.at("strict_threshold");
    m.params.seed = p.at("seed");
    m.params.logreg.l2Strength = p.at("l2_strength");
    m.params.logreg.maxIters = p.at("max_iters");
    m.params.logreg.tolerance = p.at("tolerance");
    m.representation.kind = parse_representation(j.at("representation").at("kind").get<std::string>());
    m.representation.mergedEntities = j.at("representation").at("merged_entities");
    for (const auto& it : j.at("iterations"))
      m.iterations.push_back({it.at("retained_before"), it.at("removed")});
    auto tags = [](const nlohmann::json& a) {
      std::vector<IdTag> out;
      for (const auto& t : a) {
        auto s = parse_split(t.at("split").get<std::string>());
        if (!s) throw DataError("unknown split tag in manifest");
        out.push_back({t.at("id").get<std::string>(), *s});
      }
      return out;
    };
    m.easy = tags(j.at("easy"));
    m.difficult = tags(j.at("difficult"));
    m.checksum = j.at("checksum").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

inline void save_manifest(const std::filesystem::path& path, const PartitionManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write manifest: " + path.string());
  out << manifest_to_json(m).dump(2) << '\n';
}

inline PartitionManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw DataError("malformed manifest: " + path.string());
  }
  return manifest_from_json(j);
}

struct PartitionedDataset {
  Dataset easy;
  Dataset difficult;
};

/// Splits `d` by the manifest after re-verifying its checksum. Examples keep
/// their own split tags and dataset order; examples the manifest does not
/// list are left out.
inline PartitionedDataset apply_partition(const Dataset& d, const PartitionManifest& m) {
  if (manifest_checksum(m) != m.checksum) throw DataError("checksum mismatch");
  std::unordered_set<std::string> easy;
  for (const auto& t : m.easy) {
    if (!d.contains(t.id)) throw DataError("unknown id '" + t.id + "'");
    easy.insert(t.id);
  }
  std::unordered_set<std::string> difficult;
  for (const auto& t : m.difficult) {
    if (!d.contains(t.id)) throw DataError("unknown id '" + t.id + "'");
    if (easy.contains(t.id)) throw DataError("id '" + t.id + "' is in both partitions");
    difficult.insert(t.id);
  }
  PartitionedDataset out;
  for (const auto& ex : d) {
    if (easy.contains(ex.id)) out.easy.add(ex);
    else if (difficult.contains(ex.id)) out.difficult.add(ex);
  }
  return out;
}

}  // namespace artifactprobe

#endif  // ARTIFACTPROBE_AFLITE_HPP_
