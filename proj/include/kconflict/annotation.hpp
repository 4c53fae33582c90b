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


#ifndef KCONFLICT_ANNOTATION_HPP_
#define KCONFLICT_ANNOTATION_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kconflict/catalog.hpp"
#include "kconflict/dataset.hpp"
#include "kconflict/entity_type.hpp"
#include "kconflict/error.hpp"
#include "kconflict/jsonl.hpp"
#include "kconflict/line_io.hpp"
#include "kconflict/parallel.hpp"
#include "kconflict/text.hpp"

namespace kconflict {

enum class AnnotationSource { kSidecar, kHeuristic };

inline std::string_view AnnotationSourceName(AnnotationSource source) {
  return source == AnnotationSource::kSidecar ? "sidecar" : "heuristic";
}

// The typed gold answer chosen for one instance.
struct EntityAnnotation {
  std::string qid;
  std::string answer_surface;
  EntityType entity_type = EntityType::kPer;
  std::optional<std::string> wikidata_id;
  std::optional<std::uint64_t> popularity;
  AnnotationSource source = AnnotationSource::kSidecar;

  friend bool operator==(const EntityAnnotation&,
                         const EntityAnnotation&) = default;
};

// Ordered by qid so iteration (and anything serialized from it) is stable.
using AnnotationMap = std::map<std::string, EntityAnnotation>;

inline nlohmann::json AnnotationToJson(const EntityAnnotation& a) {
  nlohmann::json j = {{"qid", a.qid},
                      {"answer", a.answer_surface},
                      {"type", std::string(EntityTypeName(a.entity_type))},
                      {"source", std::string(AnnotationSourceName(a.source))}};
  if (a.wikidata_id) j["wikidata_id"] = *a.wikidata_id;
  if (a.popularity) j["popularity"] = *a.popularity;
  return j;
}

inline EntityAnnotation AnnotationFromJson(const nlohmann::json& row,
                                           std::size_t line) {
  namespace f = json_fields;
  EntityAnnotation a;
  a.qid = f::String(row, "qid", line);
  if (a.qid.empty()) {
    throw Error(ErrorCode::kSchema, "empty qid" + f::Context(line));
  }
  a.answer_surface = f::String(row, "answer", line);
  const std::string type = f::String(row, "type", line);
  auto parsed = ParseEntityType(type);
  if (!parsed) {
    throw Error(ErrorCode::kSchema,
                "unknown entity_type \"" + type + "\"" + f::Context(line));
  }
  a.entity_type = *parsed;
  a.wikidata_id = f::OptionalString(row, "wikidata_id", line);
  a.popularity = f::OptionalCount(row, "popularity", line);
  if (a.popularity && !a.wikidata_id) {
    throw Error(ErrorCode::kSchema,
                "popularity without wikidata_id" + f::Context(line));
  }
  // Linker provenance tags ("linker", "name", "alias") are sidecar output.
  const auto source = f::OptionalString(row, "source", line);
  if (!source || *source == "sidecar" || *source == "linker" ||
      *source == "name" || *source == "alias") {
    a.source = AnnotationSource::kSidecar;
  } else if (*source == "heuristic") {
    a.source = AnnotationSource::kHeuristic;
  } else {
    throw Error(ErrorCode::kSchema,
                "unknown source \"" + *source + "\"" + f::Context(line));
  }
  return a;
}

inline AnnotationMap IngestAnnotations(LineReader& lines) {
  AnnotationMap out;
  ForEachJsonLine(lines, [&](const nlohmann::json& row, std::size_t ln) {
    EntityAnnotation a = AnnotationFromJson(row, ln);
    const std::string qid = a.qid;
    if (!out.emplace(qid, std::move(a)).second) {
      throw Error(ErrorCode::kConflict, "duplicate annotation for qid \"" +
                                            qid + "\"" +
                                            json_fields::Context(ln));
    }
  });
  return out;
}

inline AnnotationMap IngestAnnotationsFile(const std::string& path) {
  LineReader lines(path);
  return IngestAnnotations(lines);
}

inline void WriteAnnotations(const AnnotationMap& annotations,
                             LineWriter& out) {
  for (const auto& [qid, a] : annotations) out.Write(DumpJson(AnnotationToJson(a)));
}

// Result of the heuristic typer.
struct TypedAnswer {
  EntityType type;
  std::optional<std::string> wikidata_id;
  std::optional<std::uint64_t> popularity;

  friend bool operator==(const TypedAnswer&, const TypedAnswer&) = default;
};

namespace typer_internal {

inline const std::regex& DatePattern() {
  static const std::regex pattern = [] {
    const std::string month =
        "(january|february|march|april|may|june|july|august|september|"
        "october|november|december|jan|feb|mar|apr|jun|jul|aug|sep|sept|oct|"
        "nov|dec)\\.?";
    const std::string year = "\\d{4}";
    const std::string day = "\\d{1,2}(st|nd|rd|th)?";
    const std::string forms[] = {
        year,                                           // 1917
        month,                                          // April
        month + " " + year,                             // April 1917
        month + " " + day,                              // April 6
        month + " " + day + ",? " + year,               // April 6, 1917
        day + " " + month,                              // 6 April
        day + " (of )?" + month + ",? " + year,         // 6 April 1917
        "\\d{4}-\\d{2}-\\d{2}",                         // 1917-04-06
    };
    std::string alternation;
    for (const auto& form : forms) {
      if (!alternation.empty()) alternation += "|";
      alternation += "(" + form + ")";
    }
    return std::regex("^(" + alternation + ")$",
                      std::regex::ECMAScript | std::regex::icase |
                          std::regex::optimize);
  }();
  return pattern;
}

inline const std::regex& NumericPattern() {
  static const std::regex pattern(
      "^[-+]?[$]?(\\d{1,3}(,\\d{3})+|\\d+)(\\.\\d+)?"
      "( ?(%|percent))?"
      "( (hundred|thousand|million|billion|trillion))?$",
      std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
  return pattern;
}

}  // namespace typer_internal

// Pattern grammar for DAT and NUM, then a case-insensitive gazetteer lookup
// against the catalog. Returns nothing rather than guessing.
inline std::optional<TypedAnswer> TypeAnswer(std::string_view answer_text,
                                             const EntityCatalog& catalog) {
  const std::string text = CollapseWhitespace(answer_text);
  if (text.empty()) return std::nullopt;
  if (std::regex_match(text, typer_internal::DatePattern())) {
    return TypedAnswer{EntityType::kDat, std::nullopt, std::nullopt};
  }
  if (std::regex_match(text, typer_internal::NumericPattern())) {
    return TypedAnswer{EntityType::kNum, std::nullopt, std::nullopt};
  }
  const auto hits = catalog.LookupSurface(text);
  if (hits.empty()) return std::nullopt;
  const CatalogEntity& best = *hits.front();
  return TypedAnswer{best.type, best.id, best.popularity};
}

// Picks the first gold answer (list order) that gets a type and occurs in
// the context under the substitution match rule.
inline std::optional<EntityAnnotation> AnnotateInstance(
    const QAInstance& instance, const EntityCatalog& catalog) {
  for (const auto& gold : instance.gold_answers) {
    auto typed = TypeAnswer(gold, catalog);
    if (!typed || !ContainsSurface(instance.context, gold)) continue;
    return EntityAnnotation{instance.qid,       gold,
                            typed->type,        typed->wikidata_id,
                            typed->popularity,  AnnotationSource::kHeuristic};
  }
  return std::nullopt;
}

// Heuristic annotations for every instance; entries in `sidecar` win.
inline AnnotationMap AnnotateDataset(const Dataset& dataset,
                                     const EntityCatalog& catalog,
                                     const AnnotationMap* sidecar = nullptr,
                                     unsigned parallelism = 1) {
  auto typed = ParallelMap<std::optional<EntityAnnotation>>(
      dataset.size(), parallelism, [&](std::size_t i) {
        const QAInstance& instance = dataset.instances[i];
        if (sidecar != nullptr) {
          auto it = sidecar->find(instance.qid);
          if (it != sidecar->end()) {
            return std::optional<EntityAnnotation>(it->second);
          }
        }
        return AnnotateInstance(instance, catalog);
      });
  AnnotationMap out;
  for (auto& a : typed) {
    if (a) out.emplace(a->qid, std::move(*a));
  }
  return out;
}

struct SkippedInstance {
  std::string qid;
  std::string reason;

  friend bool operator==(const SkippedInstance&,
                         const SkippedInstance&) = default;
};

inline nlohmann::json SkippedToJson(const SkippedInstance& s) {
  return {{"qid", s.qid}, {"reason", s.reason}};
}

struct FilterResult {
  Dataset kept;
  std::vector<SkippedInstance> skipped;
};

namespace filter_reason {
inline constexpr std::string_view kNoAnnotation = "no-annotation";
inline constexpr std::string_view kAnswerNotGold = "answer-not-gold";
inline constexpr std::string_view kAnswerNotInContext = "answer-not-in-context";
}  // namespace filter_reason

// Empty when `annotation` is usable for `instance`, otherwise the skip
// reason.
inline std::string_view AnnotationProblem(const QAInstance& instance,
                                          const EntityAnnotation* annotation) {
  if (annotation == nullptr) return filter_reason::kNoAnnotation;
  const auto& golds = instance.gold_answers;
  if (std::find(golds.begin(), golds.end(), annotation->answer_surface) ==
      golds.end()) {
    return filter_reason::kAnswerNotGold;
  }
  if (!ContainsSurface(instance.context, annotation->answer_surface)) {
    return filter_reason::kAnswerNotInContext;
  }
  return {};
}

// Keeps instances with a usable annotation; order is preserved.
inline FilterResult FilterEntityInstances(const Dataset& dataset,
                                          const AnnotationMap& annotations,
                                          unsigned parallelism = 1) {
  auto problems = ParallelMap<std::string_view>(
      dataset.size(), parallelism, [&](std::size_t i) {
        const QAInstance& instance = dataset.instances[i];
        auto it = annotations.find(instance.qid);
        return AnnotationProblem(
            instance, it == annotations.end() ? nullptr : &it->second);
      });
  FilterResult result;
  result.kept.header = dataset.header;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (problems[i].empty()) {
      result.kept.instances.push_back(dataset.instances[i]);
    } else {
      result.skipped.push_back(
          {dataset.instances[i].qid, std::string(problems[i])});
    }
  }
  return result;
}

}  // namespace kconflict

#endif  // KCONFLICT_ANNOTATION_HPP_
