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


#ifndef KCONFLICT_AUGMENTATION_HPP_
#define KCONFLICT_AUGMENTATION_HPP_

// Mixed training data: every original instance, followed by one
// corpus-substituted copy of each instance whose context contains its typed
// gold answer.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "kconflict/annotation.hpp"
#include "kconflict/catalog.hpp"
#include "kconflict/dataset.hpp"
#include "kconflict/error.hpp"
#include "kconflict/substitution.hpp"

namespace kconflict {

inline constexpr std::string_view kCopySuffix = "-sub";

inline bool IsSubstitutedCopyQid(std::string_view qid) {
  return qid.size() >= kCopySuffix.size() &&
         qid.substr(qid.size() - kCopySuffix.size()) == kCopySuffix;
}

inline bool HasSubstitutedCopies(const Dataset& dataset) {
  for (const auto& instance : dataset.instances) {
    if (IsSubstitutedCopyQid(instance.qid)) return true;
  }
  return false;
}

// Drops every instance whose qid carries the copy suffix.
inline Dataset StripSubstitutedCopies(const Dataset& dataset) {
  Dataset out;
  out.header = dataset.header;
  for (const auto& instance : dataset.instances) {
    if (!IsSubstitutedCopyQid(instance.qid)) out.instances.push_back(instance);
  }
  return out;
}

struct AugmentationManifest {
  std::size_t n_original = 0;
  // Instances whose context contains their annotated answer.
  std::size_t n_containing = 0;
  std::size_t n_substituted = 0;
  std::uint64_t seed = 0;

  double containment_rate() const {
    return n_original == 0 ? 0.0
                           : static_cast<double>(n_substituted) /
                                 static_cast<double>(n_original);
  }
};

inline nlohmann::json ManifestToJson(const AugmentationManifest& m) {
  return {{"n_original", m.n_original},
          {"n_containing", m.n_containing},
          {"n_substituted", m.n_substituted},
          {"containment_rate", m.containment_rate()},
          {"seed", m.seed},
          {"policy", std::string(PolicyKindName(PolicyKind::kCorpus))}};
}

struct MixedTrainingSet {
  Dataset dataset;
  AugmentationManifest manifest;
  std::vector<SubstitutionRecord> records;
  // Instances that contributed no copy, with the reason.
  std::vector<SkippedInstance> skipped;
};

// Copies are corpus substitutions of their source instance (same per-qid
// random stream as SubstituteDataset) with qid + "-sub".
inline MixedTrainingSet BuildMixedTraining(const Dataset& train,
                                           const AnnotationMap& annotations,
                                           const AnswerPool& pool,
                                           std::uint64_t global_seed,
                                           unsigned parallelism = 1) {
  MixedTrainingSet mixed;
  mixed.manifest.n_original = train.size();
  mixed.manifest.seed = global_seed;
  for (const auto& instance : train.instances) {
    auto it = annotations.find(instance.qid);
    if (it != annotations.end() &&
        AnnotationProblem(instance, &it->second).empty()) {
      ++mixed.manifest.n_containing;
    }
  }
  const EntityCatalog no_catalog;
  SubstitutionResult copies =
      SubstituteDataset(train, annotations, SubstitutionPolicy::Corpus(), pool,
                        no_catalog, global_seed, parallelism);
  std::unordered_set<std::string> qids;
  for (const auto& instance : train.instances) qids.insert(instance.qid);
  mixed.dataset.header = train.header;
  mixed.dataset.instances = train.instances;
  for (std::size_t i = 0; i < copies.dataset.size(); ++i) {
    QAInstance& copy = copies.dataset.instances[i];
    SubstitutionRecord& record = copies.records[i];
    copy.qid += kCopySuffix;
    record.qid = copy.qid;
    if (!qids.insert(copy.qid).second) {
      throw Error(ErrorCode::kValidation,
                  "copy qid \"" + copy.qid + "\" collides with an existing qid");
    }
    mixed.dataset.instances.push_back(std::move(copy));
    mixed.records.push_back(std::move(record));
  }
  mixed.manifest.n_substituted = mixed.records.size();
  mixed.skipped = std::move(copies.skipped);
  return mixed;
}

}  // namespace kconflict

#endif  // KCONFLICT_AUGMENTATION_HPP_
