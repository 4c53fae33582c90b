// Copyright 2026 The kconflict Authors.
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


#ifndef KCONFLICT_SUBSTITUTION_HPP_
#define KCONFLICT_SUBSTITUTION_HPP_

// Substitute-answer selection and context rewriting: x = (q, a, c) becomes
// x' = (q, a', c') with every occurrence of a's gold surfaces replaced by a'.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kconflict/annotation.hpp"
#include "kconflict/answer_match.hpp"
#include "kconflict/catalog.hpp"
#include "kconflict/dataset.hpp"
#include "kconflict/entity_type.hpp"
#include "kconflict/error.hpp"
#include "kconflict/jsonl.hpp"
#include "kconflict/line_io.hpp"
#include "kconflict/parallel.hpp"
#include "kconflict/rng.hpp"
#include "kconflict/text.hpp"

namespace kconflict {

enum class PolicyKind { kCorpus, kTypeSwap, kPopularity, kAlias };

inline std::string_view PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kCorpus: return "corpus";
    case PolicyKind::kTypeSwap: return "type-swap";
    case PolicyKind::kPopularity: return "popularity";
    case PolicyKind::kAlias: return "alias";
  }
  return "unknown";
}

inline std::optional<PolicyKind> ParsePolicyKind(std::string_view name) {
  for (PolicyKind kind : {PolicyKind::kCorpus, PolicyKind::kTypeSwap,
                          PolicyKind::kPopularity, PolicyKind::kAlias}) {
    if (PolicyKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

struct SubstitutionPolicy {
  PolicyKind kind = PolicyKind::kCorpus;
  // TypeSwap only: restrict candidates to one type.
  std::optional<EntityType> target_type;
  // Popularity only.
  PopularityRange range;

  static SubstitutionPolicy Corpus() { return {PolicyKind::kCorpus, {}, {}}; }
  static SubstitutionPolicy TypeSwap(
      std::optional<EntityType> target = std::nullopt) {
    return {PolicyKind::kTypeSwap, target, {}};
  }
  static SubstitutionPolicy Popularity(PopularityRange range) {
    SubstitutionPolicy policy{PolicyKind::kPopularity, {}, range};
    policy.Validate();
    return policy;
  }
  static SubstitutionPolicy Alias() { return {PolicyKind::kAlias, {}, {}}; }

  void Validate() const {
    if (kind == PolicyKind::kPopularity && !range.IsValid()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "popularity policy needs lower < upper");
    }
  }

  friend bool operator==(const SubstitutionPolicy&,
                         const SubstitutionPolicy&) = default;
};

// Deduplicated gold-answer surfaces of a dataset, grouped by type.
class AnswerPool {
 public:
  AnswerPool() = default;

  // Surfaces are keyed by their case fold. A surface seen under several
  // types goes to its most frequent type (ties: enumeration order), and the
  // lexicographically smallest spelling represents the group. Lists are
  // sorted by (case fold, spelling).
  static AnswerPool FromEntries(
      const std::vector<std::pair<std::string, EntityType>>& entries) {
    struct Group {
      std::string spelling;
      std::array<std::size_t, kNumEntityTypes> votes{};
    };
    std::map<std::string, Group> groups;
    for (const auto& [surface, type] : entries) {
      if (surface.empty()) continue;
      auto [it, inserted] = groups.try_emplace(FoldCase(surface));
      if (inserted || surface < it->second.spelling) {
        it->second.spelling = surface;
      }
      ++it->second.votes[Index(type)];
    }
    AnswerPool pool;
    for (auto& [folded, group] : groups) {
      const auto best = std::max_element(group.votes.begin(), group.votes.end());
      pool.by_type_[static_cast<std::size_t>(best - group.votes.begin())]
          .push_back(group.spelling);
    }
    // std::map iteration already yields case-fold order per type.
    return pool;
  }

  static AnswerPool Build(const Dataset& dataset,
                          const AnnotationMap& annotations) {
    std::vector<std::pair<std::string, EntityType>> entries;
    for (const auto& instance : dataset.instances) {
      auto it = annotations.find(instance.qid);
      if (it == annotations.end()) continue;
      entries.emplace_back(it->second.answer_surface, it->second.entity_type);
    }
    return FromEntries(entries);
  }

  const std::vector<std::string>& Of(EntityType type) const {
    return by_type_[Index(type)];
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& list : by_type_) n += list.size();
    return n;
  }

  friend bool operator==(const AnswerPool&, const AnswerPool&) = default;

 private:
  std::array<std::vector<std::string>, kNumEntityTypes> by_type_;
};

struct SubstitutionRecord {
  std::string qid;
  SubstitutionPolicy policy;
  std::string original_answer;
  EntityType original_type = EntityType::kPer;
  std::string substitute_answer;
  EntityType substitute_type = EntityType::kPer;
  std::optional<std::string> substitute_wikidata_id;
  std::optional<std::uint64_t> substitute_popularity;
  std::size_t replaced_span_count = 0;
  bool ambiguous_substitute = false;
  std::uint64_t rng_seed_used = 0;
  std::optional<std::size_t> bucket_index;
  std::optional<std::int64_t> popularity_delta;

  friend bool operator==(const SubstitutionRecord&,
                         const SubstitutionRecord&) = default;
};

inline nlohmann::json RecordToJson(const SubstitutionRecord& r) {
  nlohmann::json j = {
      {"qid", r.qid},
      {"policy", std::string(PolicyKindName(r.policy.kind))},
      {"original_answer", r.original_answer},
      {"original_type", std::string(EntityTypeName(r.original_type))},
      {"substitute_answer", r.substitute_answer},
      {"substitute_type", std::string(EntityTypeName(r.substitute_type))},
      {"replaced_span_count", r.replaced_span_count},
      {"ambiguous_substitute", r.ambiguous_substitute},
      {"rng_seed_used", r.rng_seed_used}};
  if (r.policy.kind == PolicyKind::kTypeSwap && r.policy.target_type) {
    j["target_type"] = std::string(EntityTypeName(*r.policy.target_type));
  }
  if (r.policy.kind == PolicyKind::kPopularity) {
    j["pop_lower"] = r.policy.range.lower;
    if (r.policy.range.upper) j["pop_upper"] = *r.policy.range.upper;
  }
  if (r.substitute_wikidata_id) {
    j["substitute_wikidata_id"] = *r.substitute_wikidata_id;
  }
  if (r.substitute_popularity) {
    j["substitute_popularity"] = *r.substitute_popularity;
  }
  if (r.bucket_index) j["bucket_index"] = *r.bucket_index;
  if (r.popularity_delta) j["popularity_delta"] = *r.popularity_delta;
  return j;
}

inline SubstitutionRecord RecordFromJson(const nlohmann::json& row,
                                         std::size_t line) {
  namespace f = json_fields;
  auto type_field = [&](const char* field) {
    const std::string name = f::String(row, field, line);
    auto type = ParseEntityType(name);
    if (!type) {
      throw Error(ErrorCode::kSchema, "unknown entity_type \"" + name + "\"" +
                                          f::Context(line));
    }
    return *type;
  };
  SubstitutionRecord r;
  r.qid = f::String(row, "qid", line);
  const std::string policy = f::String(row, "policy", line);
  auto kind = ParsePolicyKind(policy);
  if (!kind) {
    throw Error(ErrorCode::kSchema,
                "unknown policy \"" + policy + "\"" + f::Context(line));
  }
  r.policy.kind = *kind;
  if (row.contains("target_type")) r.policy.target_type = type_field("target_type");
  if (auto lower = f::OptionalCount(row, "pop_lower", line)) {
    r.policy.range.lower = *lower;
  }
  r.policy.range.upper = f::OptionalCount(row, "pop_upper", line);
  r.original_answer = f::String(row, "original_answer", line);
  r.original_type = type_field("original_type");
  r.substitute_answer = f::String(row, "substitute_answer", line);
  r.substitute_type = type_field("substitute_type");
  r.substitute_wikidata_id =
      f::OptionalString(row, "substitute_wikidata_id", line);
  r.substitute_popularity = f::OptionalCount(row, "substitute_popularity", line);
  if (auto count = f::OptionalCount(row, "replaced_span_count", line)) {
    r.replaced_span_count = static_cast<std::size_t>(*count);
  }
  if (auto it = row.find("ambiguous_substitute"); it != row.end()) {
    if (!it->is_boolean()) {
      throw Error(ErrorCode::kSchema,
                  "\"ambiguous_substitute\" must be boolean" + f::Context(line));
    }
    r.ambiguous_substitute = it->get<bool>();
  }
  if (auto seed = f::OptionalCount(row, "rng_seed_used", line)) {
    r.rng_seed_used = *seed;
  }
  if (auto bucket = f::OptionalCount(row, "bucket_index", line)) {
    r.bucket_index = static_cast<std::size_t>(*bucket);
  }
  if (auto it = row.find("popularity_delta");
      it != row.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::kSchema,
                  "\"popularity_delta\" must be an integer" + f::Context(line));
    }
    r.popularity_delta = it->get<std::int64_t>();
  }
  return r;
}

inline void WriteRecords(const std::vector<SubstitutionRecord>& records,
                         LineWriter& out) {
  for (const auto& r : records) out.Write(DumpJson(RecordToJson(r)));
}

inline void WriteRecordsFile(const std::vector<SubstitutionRecord>& records,
                             const std::string& path) {
  LineWriter out(path);
  WriteRecords(records, out);
  out.Close();
}

inline std::vector<SubstitutionRecord> ReadRecords(LineReader& lines) {
  std::vector<SubstitutionRecord> out;
  ForEachJsonLine(lines, [&](const nlohmann::json& row, std::size_t ln) {
    out.push_back(RecordFromJson(row, ln));
  });
  return out;
}

inline std::vector<SubstitutionRecord> ReadRecordsFile(const std::string& path) {
  LineReader lines(path);
  return ReadRecords(lines);
}

// The chosen substitute answer a' and what is known about it.
struct SubstituteChoice {
  std::string surface;
  EntityType type = EntityType::kPer;
  std::optional<std::string> wikidata_id;
  std::optional<std::uint64_t> popularity;

  friend bool operator==(const SubstituteChoice&,
                         const SubstituteChoice&) = default;
};

// Rejects candidates that would make x' degenerate: EM-equal to an original
// gold answer, or containing an original gold surface (which would survive
// the rewrite as a residual occurrence).
class CandidateExclusion {
 public:
  explicit CandidateExclusion(const std::vector<std::string>& golds)
      : matcher_(golds) {
    for (const auto& gold : golds) normalized_golds_.insert(NormalizeAnswer(gold));
  }

  bool Excludes(std::string_view candidate) const {
    if (candidate.empty()) return true;
    const std::string normalized = NormalizeAnswer(candidate);
    return normalized.empty() || normalized_golds_.contains(normalized) ||
           matcher_.Contains(candidate);
  }

  // Alias candidates only need to differ from the golds and not contain them.
  bool ExcludesAlias(std::string_view candidate) const {
    return candidate.empty() || matcher_.Contains(candidate);
  }

 private:
  SurfaceMatcher matcher_;
  std::unordered_set<std::string> normalized_golds_;
};

namespace substitution_internal {

inline std::vector<std::string> SurfacesToReplace(
    const QAInstance& instance, const EntityAnnotation& annotation) {
  std::vector<std::string> surfaces = instance.gold_answers;
  if (std::find(surfaces.begin(), surfaces.end(), annotation.answer_surface) ==
      surfaces.end()) {
    surfaces.push_back(annotation.answer_surface);
  }
  return surfaces;
}

[[noreturn]] inline void ThrowNoCandidate(const SubstitutionPolicy& policy,
                                          EntityType type,
                                          const std::string& qid) {
  throw Error(ErrorCode::kNoCandidate,
              std::string(PolicyKindName(policy.kind)) + " policy has no " +
                  "candidate for " + std::string(EntityTypeName(type)) +
                  " answer (qid \"" + qid + "\")");
}

// Uniform draw of an index in [0, n) not rejected by `excluded`: rejection
// sampling first, then an exhaustive pass. Returns n when nothing qualifies.
template <typename Excluded>
std::size_t DrawAllowed(std::size_t n, Rng& rng, Excluded&& excluded) {
  if (n == 0) return 0;
  constexpr int kAttempts = 32;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::size_t i = rng.UniformIndex(n);
    if (!excluded(i)) return i;
  }
  std::vector<std::size_t> allowed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!excluded(i)) allowed.push_back(i);
  }
  if (allowed.empty()) return n;
  return allowed[rng.UniformIndex(allowed.size())];
}

}  // namespace substitution_internal

// Draws a' for one instance under `policy`.
//   Corpus:     pool[type(a)]
//   TypeSwap:   union of pool[t] for t != type(a), or pool[target_type]
//   Popularity: catalog entities of type(a) with popularity in range
//   Alias:      catalog aliases of a's entity
// Candidates rejected by CandidateExclusion are never drawn.
inline SubstituteChoice SelectSubstitute(const QAInstance& instance,
                                         const EntityAnnotation& annotation,
                                         const SubstitutionPolicy& policy,
                                         const AnswerPool& pool,
                                         const EntityCatalog& catalog,
                                         Rng& rng) {
  using substitution_internal::DrawAllowed;
  using substitution_internal::ThrowNoCandidate;
  const EntityType type = annotation.entity_type;
  const CandidateExclusion exclusion(
      substitution_internal::SurfacesToReplace(instance, annotation));
  switch (policy.kind) {
    case PolicyKind::kCorpus: {
      const auto& candidates = pool.Of(type);
      const std::size_t pick = DrawAllowed(
          candidates.size(), rng,
          [&](std::size_t i) { return exclusion.Excludes(candidates[i]); });
      if (pick == candidates.size()) ThrowNoCandidate(policy, type, instance.qid);
      return {candidates[pick], type, std::nullopt, std::nullopt};
    }
    case PolicyKind::kTypeSwap: {
      std::vector<EntityType> types;
      if (policy.target_type) {
        if (*policy.target_type != type) types.push_back(*policy.target_type);
      } else {
        for (EntityType t : kAllEntityTypes) {
          if (t != type) types.push_back(t);
        }
      }
      std::size_t total = 0;
      for (EntityType t : types) total += pool.Of(t).size();
      // Maps a flat index over the concatenated pools to (type, surface).
      auto locate = [&](std::size_t i) -> std::pair<EntityType, const std::string*> {
        for (EntityType t : types) {
          const auto& list = pool.Of(t);
          if (i < list.size()) return {t, &list[i]};
          i -= list.size();
        }
        return {type, nullptr};
      };
      const std::size_t pick = DrawAllowed(total, rng, [&](std::size_t i) {
        return exclusion.Excludes(*locate(i).second);
      });
      if (pick == total) {
        ThrowNoCandidate(policy, policy.target_type.value_or(type), instance.qid);
      }
      const auto [chosen_type, surface] = locate(pick);
      return {*surface, chosen_type, std::nullopt, std::nullopt};
    }
    case PolicyKind::kPopularity: {
      policy.Validate();
      try {
        const CatalogEntity& entity = catalog.SampleEntity(
            type, policy.range, rng, [&](const CatalogEntity& e) {
              return exclusion.Excludes(e.name);
            });
        return {entity.name, type, entity.id, entity.popularity};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kEmptyRange) throw;
        ThrowNoCandidate(policy, type, instance.qid);
      }
    }
    case PolicyKind::kAlias: {
      if (!annotation.wikidata_id) {
        throw Error(ErrorCode::kUnlinked,
                    "alias policy needs a linked answer (qid \"" +
                        instance.qid + "\")");
      }
      const auto& aliases = catalog.AliasesOf(*annotation.wikidata_id);
      const std::size_t pick =
          DrawAllowed(aliases.size(), rng, [&](std::size_t i) {
            return EqualsFolded(aliases[i], annotation.answer_surface) ||
                   exclusion.ExcludesAlias(aliases[i]);
          });
      if (pick == aliases.size()) ThrowNoCandidate(policy, type, instance.qid);
      return {aliases[pick], type, annotation.wikidata_id,
              catalog.Get(*annotation.wikidata_id).popularity};
    }
  }
  ThrowNoCandidate(policy, type, instance.qid);
}

// x' before provenance is attached.
struct RewrittenInstance {
  QAInstance instance;
  std::size_t replaced_span_count = 0;
  bool ambiguous_substitute = false;
};

// Replaces every match of the instance's gold surfaces (and the annotated
// surface) under the word-boundary rule with `substitute`, verbatim. The new
// instance's only gold answer is `substitute` and its spans cover exactly the
// inserted text.
inline RewrittenInstance ApplySubstitution(const QAInstance& instance,
                                           const EntityAnnotation& annotation,
                                           std::string_view substitute) {
  if (substitute.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty substitute answer");
  }
  const SurfaceMatcher matcher(
      substitution_internal::SurfacesToReplace(instance, annotation));
  const auto matches = matcher.FindAll(instance.context);
  if (matches.empty()) {
    throw Error(ErrorCode::kNoOccurrence,
                "no gold answer occurs in the context of qid \"" +
                    instance.qid + "\"");
  }
  RewrittenInstance out;
  QAInstance& x = out.instance;
  x.qid = instance.qid;
  x.question = instance.question;
  x.gold_answers = {std::string(substitute)};
  x.context.reserve(instance.context.size() +
                    matches.size() * substitute.size());
  std::size_t cursor = 0;
  for (const auto& m : matches) {
    x.context.append(instance.context, cursor, m.begin - cursor);
    const std::size_t start = x.context.size();
    x.context.append(substitute);
    x.answer_spans.push_back(Span{start, x.context.size()});
    cursor = m.end;
  }
  x.context.append(instance.context, cursor, std::string::npos);
  out.replaced_span_count = matches.size();
  out.ambiguous_substitute =
      ContainsSurface(instance.context, std::string(substitute));
  if (matcher.Contains(x.context)) {
    throw Error(ErrorCode::kResidual,
                "an original answer surface survives substitution of \"" +
                    std::string(substitute) + "\" (qid \"" + instance.qid +
                    "\")");
  }
  return out;
}

struct SubstitutedInstance {
  QAInstance instance;
  SubstitutionRecord record;
};

// Selects a' with the instance's private random stream and rewrites x.
inline SubstitutedInstance SubstituteInstance(
    const QAInstance& instance, const EntityAnnotation& annotation,
    const SubstitutionPolicy& policy, const AnswerPool& pool,
    const EntityCatalog& catalog, std::uint64_t global_seed) {
  const std::uint64_t seed = DeriveInstanceSeed(global_seed, instance.qid);
  Rng rng(seed);
  const SubstituteChoice choice =
      SelectSubstitute(instance, annotation, policy, pool, catalog, rng);
  RewrittenInstance rewritten =
      ApplySubstitution(instance, annotation, choice.surface);
  SubstitutedInstance out;
  out.instance = std::move(rewritten.instance);
  SubstitutionRecord& r = out.record;
  r.qid = instance.qid;
  r.policy = policy;
  r.original_answer = annotation.answer_surface;
  r.original_type = annotation.entity_type;
  r.substitute_answer = choice.surface;
  r.substitute_type = choice.type;
  r.substitute_wikidata_id = choice.wikidata_id;
  r.substitute_popularity = choice.popularity;
  r.replaced_span_count = rewritten.replaced_span_count;
  r.ambiguous_substitute = rewritten.ambiguous_substitute;
  r.rng_seed_used = seed;
  return out;
}

namespace skip_reason {
inline constexpr std::string_view kNoCandidate = "no-candidate";
inline constexpr std::string_view kUnlinked = "unlinked-answer";
inline constexpr std::string_view kUnknownEntity = "unknown-entity";
inline constexpr std::string_view kNoOccurrence = "no-occurrence";
inline constexpr std::string_view kResidual = "residual-occurrence";
inline constexpr std::string_view kEmptyBucket = "empty-bucket";
}  // namespace skip_reason

// Per-instance failures that turn into skips instead of aborting a run.
inline std::optional<std::string_view> SkipReasonFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoCandidate:
    case ErrorCode::kEmptyRange: return skip_reason::kNoCandidate;
    case ErrorCode::kUnlinked: return skip_reason::kUnlinked;
    case ErrorCode::kNotFound: return skip_reason::kUnknownEntity;
    case ErrorCode::kNoOccurrence: return skip_reason::kNoOccurrence;
    case ErrorCode::kResidual: return skip_reason::kResidual;
    default: return std::nullopt;
  }
}

struct SubstitutionResult {
  Dataset dataset;
  std::vector<SubstitutionRecord> records;
  std::vector<SkippedInstance> skipped;
};

// Substitutes every instance independently. Each instance draws from
// Rng(splitmix64(global_seed ^ fnv1a64(qid))), so the output depends only on
// the inputs and seed, never on `parallelism` or on other instances.
inline SubstitutionResult SubstituteDataset(const Dataset& dataset,
                                            const AnnotationMap& annotations,
                                            const SubstitutionPolicy& policy,
                                            const AnswerPool& pool,
                                            const EntityCatalog& catalog,
                                            std::uint64_t global_seed,
                                            unsigned parallelism = 1) {
  policy.Validate();
  struct Outcome {
    std::optional<SubstitutedInstance> value;
    std::string_view skip;
  };
  auto outcomes = ParallelMap<Outcome>(
      dataset.size(), parallelism, [&](std::size_t i) -> Outcome {
        const QAInstance& instance = dataset.instances[i];
        auto it = annotations.find(instance.qid);
        if (it == annotations.end()) {
          return {std::nullopt, filter_reason::kNoAnnotation};
        }
        try {
          return {SubstituteInstance(instance, it->second, policy, pool,
                                     catalog, global_seed),
                  {}};
        } catch (const Error& e) {
          auto reason = SkipReasonFor(e.code());
          if (!reason) throw;
          return {std::nullopt, *reason};
        }
      });
  SubstitutionResult result;
  result.dataset.header = dataset.header;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].value) {
      result.dataset.instances.push_back(std::move(outcomes[i].value->instance));
      result.records.push_back(std::move(outcomes[i].value->record));
    } else {
      result.skipped.push_back(
          {dataset.instances[i].qid, std::string(outcomes[i].skip)});
    }
  }
  return result;
}

struct PopularitySuiteEntry {
  PopularityBucket bucket;
  SubstitutionResult result;
};

// One substituted dataset per popularity bucket of `entity_type`. Only
// instances annotated with that type take part. Every bucket reuses the same
// per-instance seeds, so bucket results differ only through their bounds.
inline std::vector<PopularitySuiteEntry> GeneratePopularitySuite(
    const Dataset& dataset, const AnnotationMap& annotations,
    const EntityCatalog& catalog, EntityType entity_type, std::size_t k,
    std::uint64_t global_seed, unsigned parallelism = 1) {
  const auto buckets = catalog.ComputeBuckets(entity_type, k);
  Dataset restricted;
  restricted.header = dataset.header;
  for (const auto& instance : dataset.instances) {
    auto it = annotations.find(instance.qid);
    if (it != annotations.end() && it->second.entity_type == entity_type) {
      restricted.instances.push_back(instance);
    }
  }
  const AnswerPool no_pool;
  std::vector<PopularitySuiteEntry> suite;
  suite.reserve(buckets.size());
  for (const auto& bucket : buckets) {
    PopularitySuiteEntry entry{bucket, {}};
    if (!bucket.range.IsValid()) {
      // Popularity ties straddle the boundary; the bucket has no bounds.
      entry.result.dataset.header = dataset.header;
      for (const auto& instance : restricted.instances) {
        entry.result.skipped.push_back(
            {instance.qid, std::string(skip_reason::kEmptyBucket)});
      }
    } else {
      entry.result = SubstituteDataset(
          restricted, annotations, SubstitutionPolicy::Popularity(bucket.range),
          no_pool, catalog, global_seed, parallelism);
    }
    for (auto& record : entry.result.records) {
      record.bucket_index = bucket.index;
      const auto& annotation = annotations.at(record.qid);
      if (annotation.popularity && record.substitute_popularity) {
        record.popularity_delta =
            static_cast<std::int64_t>(*annotation.popularity) -
            static_cast<std::int64_t>(*record.substitute_popularity);
      }
    }
    suite.push_back(std::move(entry));
  }
  return suite;
}

}  // namespace kconflict

#endif  // KCONFLICT_SUBSTITUTION_HPP_
