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


#include "kconflict/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gtest/gtest.h"

namespace kconflict {
namespace {

using testing::BruteForceCount;
using testing::Serialize;
using testing::Ww1Annotation;
using testing::Ww1Dataset;
using testing::Ww1Instance;

AnswerPool PoolOf(std::vector<std::pair<std::string, EntityType>> entries) {
  return AnswerPool::FromEntries(entries);
}

EntityAnnotation AnnotationFor(const QAInstance& x, EntityType type) {
  return {x.qid, x.gold_answers.front(), type, std::nullopt, std::nullopt,
          AnnotationSource::kSidecar};
}

TEST(AnswerPoolTest, DedupesAndSorts) {
  Dataset d;
  AnnotationMap annotations;
  const char* answers[] = {"Germany", "Taiwan", "Germany"};
  for (int i = 0; i < 3; ++i) {
    QAInstance x;
    x.qid = "q" + std::to_string(i);
    x.gold_answers = {answers[i]};
    d.instances.push_back(x);
    annotations[x.qid] = AnnotationFor(x, EntityType::kLoc);
  }
  const AnswerPool pool = AnswerPool::Build(d, annotations);
  EXPECT_EQ(pool.Of(EntityType::kLoc), (std::vector<std::string>{"Germany", "Taiwan"}));
  EXPECT_EQ(pool.size(), 2u);
  EXPECT_EQ(AnswerPool::Build(Dataset{}, {}).size(), 0u);
}

TEST(AnswerPoolTest, FiveTypesDisjointMatchesSetArithmetic) {
  const auto corpus = testing::MakeSyntheticCorpus(500, 21);
  const AnswerPool pool = AnswerPool::Build(corpus.dataset, corpus.annotations);
  // Oracle: per-type sets of annotated surfaces.
  std::map<EntityType, std::set<std::string>> expected;
  for (const auto& [qid, a] : corpus.annotations) {
    expected[a.entity_type].insert(a.answer_surface);
  }
  std::set<std::string> seen;
  for (EntityType t : kAllEntityTypes) {
    const auto& list = pool.Of(t);
    EXPECT_FALSE(list.empty());
    EXPECT_EQ(std::set<std::string>(list.begin(), list.end()), expected[t]);
    for (const auto& s : list) EXPECT_TRUE(seen.insert(s).second) << s;
  }
}

TEST(AnswerPoolTest, CaseVariantsCollapseToMajorityType) {
  const AnswerPool pool = PoolOf({{"Jordan", EntityType::kLoc},
                                  {"jordan", EntityType::kPer},
                                  {"JORDAN", EntityType::kPer},
                                  {"Amman", EntityType::kLoc}});
  EXPECT_EQ(pool.Of(EntityType::kPer), (std::vector<std::string>{"JORDAN"}));
  EXPECT_EQ(pool.Of(EntityType::kLoc), (std::vector<std::string>{"Amman"}));
}

TEST(SelectSubstituteTest, CorpusWw1ForcedTaiwan) {
  const AnswerPool pool = PoolOf({{"Germany", EntityType::kLoc},
                                  {"Taiwan", EntityType::kLoc}});
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto choice = SelectSubstitute(Ww1Instance(), Ww1Annotation(),
                                         SubstitutionPolicy::Corpus(), pool,
                                         EntityCatalog(), rng);
    EXPECT_EQ(choice.surface, "Taiwan");
    EXPECT_EQ(choice.type, EntityType::kLoc);
  }
}

TEST(SelectSubstituteTest, TypeSwapWithTarget) {
  QAInstance x;
  x.qid = "j";
  x.context = "He was born in Jordan.";
  x.gold_answers = {"Jordan"};
  const AnswerPool pool = PoolOf({{"1917", EntityType::kDat},
                                  {"Amman", EntityType::kLoc},
                                  {"Alice", EntityType::kPer}});
  Rng rng(1);
  const auto choice = SelectSubstitute(x, AnnotationFor(x, EntityType::kLoc),
                                       SubstitutionPolicy::TypeSwap(EntityType::kDat),
                                       pool, EntityCatalog(), rng);
  EXPECT_EQ(choice.surface, "1917");
  EXPECT_EQ(choice.type, EntityType::kDat);
  // Untargeted: never the original type.
  for (int i = 0; i < 100; ++i) {
    const auto any = SelectSubstitute(x, AnnotationFor(x, EntityType::kLoc),
                                      SubstitutionPolicy::TypeSwap(), pool,
                                      EntityCatalog(), rng);
    EXPECT_NE(any.type, EntityType::kLoc);
  }
  // Target equal to the original type cannot produce a swap.
  try {
    SelectSubstitute(x, AnnotationFor(x, EntityType::kLoc),
                     SubstitutionPolicy::TypeSwap(EntityType::kLoc), pool,
                     EntityCatalog(), rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidate);
  }
}

TEST(SelectSubstituteTest, TypeSwapIsUniformPerCandidate) {
  QAInstance x;
  x.qid = "j";
  x.context = "Jordan";
  x.gold_answers = {"Jordan"};
  // DAT has 1 candidate, PER 3: per-candidate uniform gives DAT 1/4.
  const AnswerPool pool = PoolOf({{"1917", EntityType::kDat},
                                  {"Alice", EntityType::kPer},
                                  {"Bob", EntityType::kPer},
                                  {"Carol", EntityType::kPer}});
  Rng rng(77);
  int dat = 0;
  constexpr int kDraws = 8000;
  for (int i = 0; i < kDraws; ++i) {
    dat += SelectSubstitute(x, AnnotationFor(x, EntityType::kLoc),
                            SubstitutionPolicy::TypeSwap(), pool, EntityCatalog(),
                            rng)
               .type == EntityType::kDat;
  }
  EXPECT_NEAR(dat / static_cast<double>(kDraws), 0.25, 5 * std::sqrt(0.25 * 0.75 / kDraws));
}

TEST(SelectSubstituteTest, AliasErrors) {
  const EntityCatalog catalog({{"Q1", "Solo", EntityType::kPer, 3, {}},
                               {"Q2", "Michael Jordan", EntityType::kPer, 9,
                                {"MJ", "His Airness", "michael jordan jr"}}});
  QAInstance x;
  x.qid = "a";
  x.context = "Solo won.";
  x.gold_answers = {"Solo"};
  EntityAnnotation a = AnnotationFor(x, EntityType::kPer);
  Rng rng(3);
  try {
    SelectSubstitute(x, a, SubstitutionPolicy::Alias(), {}, catalog, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnlinked);
  }
  a.wikidata_id = "Q1";
  try {
    SelectSubstitute(x, a, SubstitutionPolicy::Alias(), {}, catalog, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidate);
  }
  // Aliases containing the original surface are never chosen.
  QAInstance mj;
  mj.qid = "m";
  mj.context = "Michael Jordan scored.";
  mj.gold_answers = {"Michael Jordan"};
  EntityAnnotation ma = AnnotationFor(mj, EntityType::kPer);
  ma.wikidata_id = "Q2";
  std::set<std::string> drawn;
  for (int i = 0; i < 200; ++i) {
    drawn.insert(
        SelectSubstitute(mj, ma, SubstitutionPolicy::Alias(), {}, catalog, rng).surface);
  }
  EXPECT_EQ(drawn, (std::set<std::string>{"MJ", "His Airness"}));
}

TEST(SelectSubstituteTest, PopularityRespectsBoundsAndExcludesOriginal) {
  const EntityCatalog catalog({{"Q1", "Ann", EntityType::kPer, 10, {}},
                               {"Q2", "Ben", EntityType::kPer, 20, {}},
                               {"Q3", "Cid", EntityType::kPer, 30, {}},
                               {"Q4", "Dee", EntityType::kOrg, 20, {}}});
  QAInstance x;
  x.qid = "p";
  x.context = "Ben spoke.";
  x.gold_answers = {"Ben"};
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto choice = SelectSubstitute(
        x, AnnotationFor(x, EntityType::kPer),
        SubstitutionPolicy::Popularity({10, 31}), {}, catalog, rng);
    EXPECT_NE(choice.surface, "Ben");
    EXPECT_NE(choice.wikidata_id, "Q4");
  }
  try {
    SelectSubstitute(x, AnnotationFor(x, EntityType::kPer),
                     SubstitutionPolicy::Popularity({15, 25}), {}, catalog, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoCandidate);
  }
  EXPECT_THROW(SubstitutionPolicy::Popularity({5, 5}), Error);
}

TEST(ApplySubstitutionTest, Ww1) {
  const auto out = ApplySubstitution(Ww1Instance(), Ww1Annotation(), "Taiwan");
  EXPECT_EQ(out.instance.context,
            "The United States declared war on Taiwan on April 6, 1917, over 2 "
            "years after World War I started ...");
  EXPECT_EQ(out.instance.gold_answers, (std::vector<std::string>{"Taiwan"}));
  EXPECT_EQ(out.instance.question, Ww1Instance().question);
  ASSERT_EQ(out.instance.answer_spans.size(), 1u);
  EXPECT_EQ(out.instance.SpanText(out.instance.answer_spans[0]), "Taiwan");
  EXPECT_EQ(out.replaced_span_count, 1u);
  EXPECT_FALSE(out.ambiguous_substitute);
  EXPECT_TRUE(ValidateInstance(out.instance).empty());
}

TEST(ApplySubstitutionTest, ReplacesEveryOccurrence) {
  QAInstance x;
  x.qid = "g";
  x.context = "Germany beat Germany";
  x.gold_answers = {"Germany"};
  const auto out = ApplySubstitution(x, AnnotationFor(x, EntityType::kLoc), "Taiwan");
  EXPECT_EQ(out.instance.context, "Taiwan beat Taiwan");
  EXPECT_EQ(out.replaced_span_count, 2u);
  // Oracle: brute-force scan before and after.
  EXPECT_EQ(BruteForceCount(x.context, "Germany"), 2u);
  EXPECT_EQ(BruteForceCount(out.instance.context, "Germany"), 0u);
  EXPECT_EQ(BruteForceCount(out.instance.context, "Taiwan"), 2u);
}

TEST(ApplySubstitutionTest, AllGoldVariantsLongestFirst) {
  QAInstance x;
  x.qid = "v";
  x.context = "The United States of America, or the united states, or US.";
  x.gold_answers = {"United States", "United States of America", "US"};
  const auto out =
      ApplySubstitution(x, AnnotationFor(x, EntityType::kLoc), "Mexico");
  EXPECT_EQ(out.instance.context, "The Mexico, or the Mexico, or Mexico.");
  EXPECT_EQ(out.replaced_span_count, 3u);
}

TEST(ApplySubstitutionTest, NoOccurrenceAndAmbiguity) {
  QAInstance x = Ww1Instance();
  x.context = "Nothing relevant.";
  try {
    ApplySubstitution(x, Ww1Annotation(), "Taiwan");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoOccurrence);
  }
  QAInstance y = Ww1Instance();
  y.context = "Germany and Taiwan";
  EXPECT_TRUE(ApplySubstitution(y, Ww1Annotation(), "Taiwan").ambiguous_substitute);
}

TEST(ApplySubstitutionTest, ResidualFromAdjacentTextIsRejected) {
  QAInstance x;
  x.qid = "r";
  x.context = "Germany City";
  x.gold_answers = {"Germany", "Taiwan City"};
  try {
    ApplySubstitution(x, AnnotationFor(x, EntityType::kLoc), "Taiwan");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResidual);
  }
}

// Property: residual-zero, span correctness and length accounting on random
// contexts with a single gold surface.
TEST(ApplySubstitutionTest, RandomizedProperties) {
  std::mt19937_64 gen(123);
  const std::vector<std::string> words = {"alpha", "Beta", "gamma", "x", ",",
                                          ".", "delta-", "Omega"};
  const std::vector<std::string> answers = {"Beta", "gamma ray", "Q-7", "Omega"};
  const std::vector<std::string> subs = {"Zed", "a much longer substitute", "Y"};
  for (int trial = 0; trial < 3000; ++trial) {
    const std::string gold = answers[gen() % answers.size()];
    QAInstance x;
    x.qid = "t" + std::to_string(trial);
    x.gold_answers = {gold};
    for (std::size_t i = 0, n = 1 + gen() % 12; i < n; ++i) {
      x.context += (gen() % 3 == 0 ? gold : words[gen() % words.size()]);
      x.context += gen() % 2 ? " " : "";
    }
    const std::string sub = subs[gen() % subs.size()];
    const std::size_t before = BruteForceCount(x.context, gold);
    if (before == 0) continue;
    RewrittenInstance out;
    try {
      out = ApplySubstitution(x, AnnotationFor(x, EntityType::kLoc), sub);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::kResidual);
      continue;
    }
    EXPECT_EQ(BruteForceCount(out.instance.context, gold), 0u) << x.context;
    EXPECT_EQ(out.replaced_span_count, before);
    EXPECT_EQ(out.instance.context.size(),
              x.context.size() + before * sub.size() - before * gold.size());
    for (const auto& span : out.instance.answer_spans) {
      EXPECT_EQ(out.instance.SpanText(span), sub);
    }
  }
}

TEST(SubstituteDatasetTest, Ww1AnySeed) {
  const AnswerPool pool = PoolOf({{"Germany", EntityType::kLoc},
                                  {"Taiwan", EntityType::kLoc}});
  const AnnotationMap annotations = {{"q1", Ww1Annotation()}};
  for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
    const auto result = SubstituteDataset(Ww1Dataset(), annotations,
                                          SubstitutionPolicy::Corpus(), pool,
                                          EntityCatalog(), seed);
    ASSERT_EQ(result.dataset.size(), 1u);
    EXPECT_TRUE(result.skipped.empty());
    const auto& r = result.records[0];
    EXPECT_EQ(r.substitute_answer, "Taiwan");
    EXPECT_EQ(r.original_answer, "Germany");
    EXPECT_EQ(r.rng_seed_used, DeriveInstanceSeed(seed, "q1"));
    EXPECT_NE(result.dataset.instances[0].context.find("war on Taiwan on"),
              std::string::npos);
  }
}

TEST(SubstituteDatasetTest, DeterministicAndParallelismIndependent) {
  const auto corpus = testing::MakeSyntheticCorpus(2000, 5);
  const AnswerPool pool = AnswerPool::Build(corpus.dataset, corpus.annotations);
  for (const auto& policy :
       {SubstitutionPolicy::Corpus(), SubstitutionPolicy::TypeSwap(),
        SubstitutionPolicy::Popularity({0, 2500000}), SubstitutionPolicy::Alias()}) {
    const auto a = SubstituteDataset(corpus.dataset, corpus.annotations, policy,
                                     pool, corpus.catalog, 7, 1);
    const auto b = SubstituteDataset(corpus.dataset, corpus.annotations, policy,
                                     pool, corpus.catalog, 7, 8);
    EXPECT_EQ(Serialize(a.dataset), Serialize(b.dataset));
    EXPECT_EQ(Serialize(a.records), Serialize(b.records));
    EXPECT_EQ(a.skipped, b.skipped);
    const auto c = SubstituteDataset(corpus.dataset, corpus.annotations, policy,
                                     pool, corpus.catalog, 8, 1);
    EXPECT_NE(Serialize(a.records), Serialize(c.records));
  }
}

TEST(SubstituteDatasetTest, IndependentOfDatasetOrder) {
  const auto corpus = testing::MakeSyntheticCorpus(300, 8);
  const AnswerPool pool = AnswerPool::Build(corpus.dataset, corpus.annotations);
  Dataset reversed = corpus.dataset;
  std::reverse(reversed.instances.begin(), reversed.instances.end());
  const auto a = SubstituteDataset(corpus.dataset, corpus.annotations,
                                   SubstitutionPolicy::Corpus(), pool,
                                   corpus.catalog, 3);
  auto b = SubstituteDataset(reversed, corpus.annotations,
                             SubstitutionPolicy::Corpus(), pool, corpus.catalog, 3);
  std::reverse(b.records.begin(), b.records.end());
  EXPECT_EQ(a.records, b.records);
}

TEST(SubstituteDatasetTest, AllUnlinkedUnderAliasAreSkipped) {
  auto corpus = testing::MakeSyntheticCorpus(50, 2);
  for (auto& [qid, a] : corpus.annotations) {
    a.wikidata_id.reset();
    a.popularity.reset();
  }
  const auto result = SubstituteDataset(corpus.dataset, corpus.annotations,
                                        SubstitutionPolicy::Alias(), {},
                                        corpus.catalog, 1);
  EXPECT_TRUE(result.dataset.empty());
  ASSERT_EQ(result.skipped.size(), 50u);
  for (const auto& s : result.skipped) EXPECT_EQ(s.reason, "unlinked-answer");
}

TEST(SubstituteDatasetTest, PolicyPredicatesHoldOnRandomCorpora) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto corpus = testing::MakeSyntheticCorpus(400, seed * 31);
    const AnswerPool pool = AnswerPool::Build(corpus.dataset, corpus.annotations);
    for (const auto& policy :
         {SubstitutionPolicy::Corpus(), SubstitutionPolicy::TypeSwap(),
          SubstitutionPolicy::TypeSwap(EntityType::kNum),
          SubstitutionPolicy::Popularity({1000, 3000000}),
          SubstitutionPolicy::Alias()}) {
      const auto result = SubstituteDataset(corpus.dataset, corpus.annotations,
                                            policy, pool, corpus.catalog, seed);
      EXPECT_FALSE(result.records.empty());
      const auto index = IndexByQid(corpus.dataset);
      for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& r = result.records[i];
        const auto& annotation = corpus.annotations.at(r.qid);
        EXPECT_EQ(testing::PolicyViolation(r, pool, corpus.catalog, annotation), "")
            << r.qid;
        const QAInstance& x = result.dataset.instances[i];
        const QAInstance& original = corpus.dataset.instances[index.at(r.qid)];
        for (const auto& gold : original.gold_answers) {
          EXPECT_EQ(BruteForceCount(x.context, gold), 0u);
        }
        EXPECT_EQ(x.answer_spans.size(), r.replaced_span_count);
        for (const auto& span : x.answer_spans) {
          EXPECT_EQ(x.SpanText(span), r.substitute_answer);
        }
      }
    }
  }
}

TEST(RecordJsonTest, RoundTripsAllFields) {
  SubstitutionRecord r;
  r.qid = "q";
  r.policy = SubstitutionPolicy::Popularity({3, 9});
  r.original_answer = "A";
  r.original_type = EntityType::kPer;
  r.substitute_answer = "B";
  r.substitute_type = EntityType::kPer;
  r.substitute_wikidata_id = "Q9";
  r.substitute_popularity = 4;
  r.replaced_span_count = 2;
  r.ambiguous_substitute = true;
  r.rng_seed_used = 0xffffffffffffffffULL;
  r.bucket_index = 3;
  r.popularity_delta = -12;
  EXPECT_EQ(RecordFromJson(RecordToJson(r), 1), r);
  SubstitutionRecord t;
  t.qid = "t";
  t.policy = SubstitutionPolicy::TypeSwap(EntityType::kDat);
  t.substitute_type = EntityType::kDat;
  t.replaced_span_count = 1;
  EXPECT_EQ(RecordFromJson(RecordToJson(t), 1), t);
}

TEST(PopularitySuiteTest, OnePersonFiveBuckets) {
  std::vector<CatalogEntity> entities;
  for (int i = 0; i < 25; ++i) {
    entities.push_back({"P" + std::to_string(i), "Person " + std::to_string(i),
                        EntityType::kPer, static_cast<std::uint64_t>(100 * (i + 1)),
                        {}});
  }
  const EntityCatalog catalog(entities);
  QAInstance x;
  x.qid = "per1";
  x.context = "The award went to Jane Roe in 1990.";
  x.gold_answers = {"Jane Roe"};
  Dataset d;
  d.instances = {x};
  AnnotationMap annotations = {{"per1", {"per1", "Jane Roe", EntityType::kPer,
                                         "J1", 1000, AnnotationSource::kSidecar}}};
  const auto suite =
      GeneratePopularitySuite(d, annotations, catalog, EntityType::kPer, 5, 11);
  ASSERT_EQ(suite.size(), 5u);
  for (const auto& entry : suite) {
    ASSERT_EQ(entry.result.records.size(), 1u);
    const auto& r = entry.result.records[0];
    EXPECT_EQ(r.bucket_index, entry.bucket.index);
    EXPECT_TRUE(entry.bucket.range.Contains(*r.substitute_popularity));
    EXPECT_EQ(*r.popularity_delta,
              1000 - static_cast<std::int64_t>(*r.substitute_popularity));
  }
}

TEST(PopularitySuiteTest, NoInstancesOfTypeGivesEmptyDatasets) {
  const auto corpus = testing::MakeSyntheticCorpus(100, 4);
  AnnotationMap loc_only;
  Dataset d;
  for (const auto& x : corpus.dataset.instances) {
    const auto& a = corpus.annotations.at(x.qid);
    if (a.entity_type == EntityType::kLoc) {
      loc_only[x.qid] = a;
      d.instances.push_back(x);
    }
  }
  const auto suite = GeneratePopularitySuite(d, loc_only, corpus.catalog,
                                             EntityType::kPer, 5, 1);
  ASSERT_EQ(suite.size(), 5u);
  for (const auto& entry : suite) {
    EXPECT_TRUE(entry.result.dataset.empty());
    EXPECT_TRUE(entry.result.skipped.empty());
  }
}

TEST(PopularitySuiteTest, SingleBucketEqualsFullRangePopularity) {
  const auto corpus = testing::MakeSyntheticCorpus(300, 6);
  Dataset per;
  for (const auto& x : corpus.dataset.instances) {
    if (corpus.annotations.at(x.qid).entity_type == EntityType::kPer) {
      per.instances.push_back(x);
    }
  }
  const auto suite = GeneratePopularitySuite(per, corpus.annotations, corpus.catalog,
                                             EntityType::kPer, 1, 9);
  const auto full = SubstituteDataset(per, corpus.annotations,
                                      SubstitutionPolicy::Popularity({0, std::nullopt}),
                                      {}, corpus.catalog, 9);
  ASSERT_EQ(suite.size(), 1u);
  EXPECT_EQ(Serialize(suite[0].result.dataset), Serialize(full.dataset));
  ASSERT_EQ(suite[0].result.records.size(), full.records.size());
  for (std::size_t i = 0; i < full.records.size(); ++i) {
    EXPECT_EQ(suite[0].result.records[i].substitute_answer,
              full.records[i].substitute_answer);
    EXPECT_EQ(suite[0].result.records[i].substitute_wikidata_id,
              full.records[i].substitute_wikidata_id);
  }
}

TEST(PopularitySuiteTest, InsufficientPopulationPropagates) {
  const EntityCatalog catalog({{"P1", "A", EntityType::kPer, 1, {}}});
  try {
    GeneratePopularitySuite(Dataset{}, {}, catalog, EntityType::kPer, 5, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficient);
  }
}

}  // namespace
}  // namespace kconflict
