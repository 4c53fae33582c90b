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


#ifndef KCONFLICT_TESTS_FIXTURES_HPP_
#define KCONFLICT_TESTS_FIXTURES_HPP_

// Shared test data and test-only oracles. The oracles here deliberately avoid
// the library's matcher and sampler so they can check them independently.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kconflict/kconflict.hpp"

namespace kconflict::testing {

inline constexpr const char* kWw1Question = "who did US fight in world war 1?";
inline constexpr const char* kWw1Context =
    "The United States declared war on Germany on April 6, 1917, over 2 years "
    "after World War I started ...";

inline QAInstance Ww1Instance() {
  QAInstance x;
  x.qid = "q1";
  x.question = kWw1Question;
  x.context = kWw1Context;
  x.gold_answers = {"Germany"};
  const std::size_t start = x.context.find("Germany");
  x.answer_spans = {Span{start, start + 7}};
  return x;
}

inline Dataset Ww1Dataset() {
  Dataset d;
  d.header = {{"dataset", "NaturalQuestions"}, {"split", "dev"}};
  d.instances = {Ww1Instance()};
  return d;
}

inline EntityAnnotation Ww1Annotation() {
  return {"q1", "Germany", EntityType::kLoc, "Q183", 1500000,
          AnnotationSource::kSidecar};
}

inline std::string Ww1MrqaText() {
  return std::string("{\"header\": {\"dataset\": \"NaturalQuestions\", "
                     "\"split\": \"dev\"}}\n") +
         "{\"context\": \"" + kWw1Context +
         "\", \"qas\": [{\"qid\": \"q1\", \"question\": \"" + kWw1Question +
         "\", \"answers\": [\"Germany\"], \"detected_answers\": "
         "[{\"text\": \"Germany\", \"char_spans\": [[34, 40]], "
         "\"token_spans\": [[6, 6]]}]}]}\n";
}

inline void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

inline std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string Serialize(const Dataset& d) {
  std::ostringstream out;
  WriteMrqa(d, out, false);
  return out.str();
}

inline std::string Serialize(const std::vector<SubstitutionRecord>& records) {
  std::ostringstream out;
  LineWriter w(out, false);
  WriteRecords(records, w);
  w.Close();
  return out.str();
}

// Positions of `needle` in `haystack`, ASCII case-insensitive, delimited by
// non-alphanumeric ASCII bytes (bytes >= 0x80 count as letters).
inline std::size_t BruteForceCount(const std::string& haystack,
                                   const std::string& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return 0;
  auto lower = [](std::string s) {
    for (auto& c : s) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return s;
  };
  auto wordy = [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u >= 0x80;
  };
  const std::string h = lower(haystack);
  const std::string n = lower(needle);
  std::size_t count = 0;
  for (std::size_t i = 0; i + n.size() <= h.size(); ++i) {
    if (h.compare(i, n.size(), n) != 0) continue;
    if (i > 0 && wordy(h[i - 1])) continue;
    if (i + n.size() < h.size() && wordy(h[i + n.size()])) continue;
    ++count;
  }
  return count;
}

// Synthetic corpus with gold answers drawn from a generated catalog.
struct SyntheticCorpus {
  Dataset dataset;
  AnnotationMap annotations;
  EntityCatalog catalog;
};

inline std::string SyntheticWord(std::mt19937_64& gen, int syllables) {
  static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n",
                                  "p", "r", "s", "t", "v", "z", "br", "tr"};
  static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
  std::string w;
  for (int s = 0; s < syllables; ++s) {
    w += kOnsets[gen() % 16];
    w += kVowels[gen() % 7];
  }
  w[0] = static_cast<char>(w[0] - 32);
  return w;
}

inline std::string SyntheticSurface(EntityType type, std::mt19937_64& gen,
                                    std::size_t serial) {
  switch (type) {
    case EntityType::kPer:
      return SyntheticWord(gen, 2) + " " + SyntheticWord(gen, 3) + " " +
             std::to_string(serial);
    case EntityType::kDat:
      return "March " + std::to_string(1 + serial % 28) + ", " +
             std::to_string(1000 + serial);
    case EntityType::kNum:
      return std::to_string(10000 + serial) + " thousand";
    case EntityType::kOrg:
      return SyntheticWord(gen, 3) + " Corp " + std::to_string(serial);
    case EntityType::kLoc:
      return "Port " + SyntheticWord(gen, 3) + " " + std::to_string(serial);
  }
  return {};
}

// `n` instances; each type gets `entities_per_type` catalog entities with
// distinct popularities and 0-3 aliases. Every context mentions its answer
// 1-3 times, sometimes in lower case.
inline SyntheticCorpus MakeSyntheticCorpus(std::size_t n, std::uint64_t seed,
                                           std::size_t entities_per_type = 60) {
  std::mt19937_64 gen(seed);
  std::vector<CatalogEntity> entities;
  std::size_t serial = 0;
  for (EntityType type : kAllEntityTypes) {
    for (std::size_t i = 0; i < entities_per_type; ++i) {
      CatalogEntity e;
      e.id = "Q" + std::to_string(100000 + serial);
      e.name = SyntheticSurface(type, gen, serial);
      e.type = type;
      e.popularity = 1 + gen() % 5000000;
      const std::size_t aliases = gen() % 4;
      for (std::size_t a = 0; a < aliases; ++a) {
        e.aliases.push_back(SyntheticWord(gen, 2) + " " +
                            std::to_string(serial) + "-" + std::to_string(a));
      }
      entities.push_back(std::move(e));
      ++serial;
    }
  }
  SyntheticCorpus corpus;
  corpus.catalog = EntityCatalog(entities);
  corpus.dataset.header = {{"dataset", "synthetic"}, {"seed", seed}};
  static const char* kFiller[] = {"the", "report", "said", "that", "in",
                                  "early", "records", "and", "a", "later",
                                  "council", "noted", "with", "river"};
  for (std::size_t i = 0; i < n; ++i) {
    const CatalogEntity& e = entities[gen() % entities.size()];
    QAInstance x;
    x.qid = "syn-" + std::to_string(i);
    x.question = "what about item " + std::to_string(i) + "?";
    x.gold_answers = {e.name};
    const std::size_t mentions = 1 + gen() % 3;
    for (std::size_t m = 0; m < mentions; ++m) {
      for (std::size_t f = 0, nf = 2 + gen() % 6; f < nf; ++f) {
        x.context += kFiller[gen() % 14];
        x.context += ' ';
      }
      std::string surface = e.name;
      if (gen() % 4 == 0) surface = FoldCase(surface);
      const std::size_t start = x.context.size();
      x.context += surface;
      if (surface == e.name) x.answer_spans.push_back({start, x.context.size()});
      x.context += gen() % 2 ? ". " : ", ";
    }
    x.context += "end.";
    corpus.annotations[x.qid] = EntityAnnotation{
        x.qid, e.name, e.type, e.id, e.popularity, AnnotationSource::kSidecar};
    corpus.dataset.instances.push_back(std::move(x));
  }
  return corpus;
}

// Independent check of one record's policy predicate. Returns an empty
// string when the predicate holds.
inline std::string PolicyViolation(const SubstitutionRecord& r,
                                   const AnswerPool& pool,
                                   const EntityCatalog& catalog,
                                   const EntityAnnotation& annotation) {
  auto in_pool = [&](EntityType t) {
    const auto& list = pool.Of(t);
    return std::find(list.begin(), list.end(), r.substitute_answer) != list.end();
  };
  if (r.original_answer != annotation.answer_surface ||
      r.original_type != annotation.entity_type) {
    return "original answer/type mismatch";
  }
  switch (r.policy.kind) {
    case PolicyKind::kCorpus:
      if (r.substitute_type != r.original_type) return "corpus: type changed";
      if (NormalizeAnswer(r.substitute_answer) ==
          NormalizeAnswer(r.original_answer)) {
        return "corpus: EM-equal substitute";
      }
      if (!in_pool(r.substitute_type)) return "corpus: not from pool";
      return {};
    case PolicyKind::kTypeSwap:
      if (r.substitute_type == r.original_type) return "type-swap: same type";
      if (r.policy.target_type && r.substitute_type != *r.policy.target_type) {
        return "type-swap: wrong target";
      }
      if (!in_pool(r.substitute_type)) return "type-swap: not from pool";
      return {};
    case PolicyKind::kPopularity: {
      if (r.substitute_type != r.original_type) return "popularity: type changed";
      if (!r.substitute_wikidata_id) return "popularity: no entity id";
      const CatalogEntity* e = catalog.Find(*r.substitute_wikidata_id);
      if (e == nullptr || e->name != r.substitute_answer) {
        return "popularity: entity mismatch";
      }
      if (e->type != r.original_type) return "popularity: catalog type";
      if (e->popularity < r.policy.range.lower ||
          (r.policy.range.upper && e->popularity >= *r.policy.range.upper)) {
        return "popularity: out of bounds";
      }
      return {};
    }
    case PolicyKind::kAlias: {
      if (!annotation.wikidata_id) return "alias: unlinked";
      const CatalogEntity* e = catalog.Find(*annotation.wikidata_id);
      if (e == nullptr) return "alias: unknown entity";
      if (std::find(e->aliases.begin(), e->aliases.end(), r.substitute_answer) ==
          e->aliases.end()) {
        return "alias: not an alias";
      }
      if (FoldCase(r.substitute_answer) == FoldCase(r.original_answer)) {
        return "alias: equals original";
      }
      return {};
    }
  }
  return "unknown policy";
}

// Training set of `n` instances (n divisible by 4) in which exactly every
// fourth context contains its annotated answer. All answers are LOC and
// distinct, so each containing instance has corpus candidates.
inline SyntheticCorpus MakeAugmentationFixture(std::size_t n) {
  SyntheticCorpus fixture;
  fixture.dataset.header = {{"dataset", "augment-fixture"}, {"split", "train"}};
  for (std::size_t i = 0; i < n; ++i) {
    QAInstance x;
    x.qid = "tr" + std::to_string(i);
    x.question = "where is site " + std::to_string(i) + "?";
    const std::string answer = "Placeville " + std::to_string(i);
    x.gold_answers = {answer};
    if (i % 4 == 0) {
      x.context = "The site lies in " + answer + " by the coast.";
      x.answer_spans = {{17, 17 + answer.size()}};
    } else {
      x.context = "The site lies somewhere inland.";
    }
    fixture.annotations[x.qid] = EntityAnnotation{
        x.qid, answer, EntityType::kLoc, std::nullopt, std::nullopt,
        AnnotationSource::kSidecar};
    fixture.dataset.instances.push_back(std::move(x));
  }
  return fixture;
}

// Exact-match golden cases. Expected flags were produced by a separate run
// of the reference normalizer (lower, strip punctuation, drop articles,
// collapse whitespace) and frozen here.
struct EmCase {
  const char* prediction;
  std::vector<std::string> golds;
  bool expected;
};

inline const std::vector<EmCase>& EmGoldenTable() {
  static const std::vector<EmCase> kTable = {
      {"the astros", {"the Houston Astros"}, false},
      {"Germany", {"Germany"}, true},
      {"taiwan!", {"Taiwan"}, true},
      {"The Crazy Chicken", {"crazy chicken"}, true},
      {"757,900", {"757900"}, true},
      {"  Taiwan! ", {"Taiwan"}, true},
      {"an apple", {"Apple"}, true},
      {"A.D. 1917", {"ad 1917"}, true},
      {"Theodore Roosevelt", {"Roosevelt"}, false},
      {"theater", {"the ater"}, false},
      {"U.S.", {"US"}, true},
      {"april 6, 1917", {"April 6 1917"}, true},
      {"St. Louis", {"St Louis", "Saint Louis"}, true},
      {"Saint Louis", {"St. Louis"}, false},
      {"rock-and-roll", {"rock and roll"}, false},
      {"rock-and-roll", {"rockandroll"}, true},
      {"", {""}, true},
      {"the", {"a"}, true},
      {"Michael Jordan", {"Jordan", "MJ"}, false},
      {"new\tyork\ncity", {"New York City"}, true},
  };
  return kTable;
}

}  // namespace kconflict::testing

#endif  // KCONFLICT_TESTS_FIXTURES_HPP_
