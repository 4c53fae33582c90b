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


#ifndef KCONFLICT_DATASET_HPP_
#define KCONFLICT_DATASET_HPP_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "kconflict/error.hpp"
#include "kconflict/text.hpp"

namespace kconflict {

// Half-open [start, end) byte range into a context. Files carry inclusive
// code point offsets; the MRQA reader and writer convert at the boundary.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Span&, const Span&) = default;
};

// One (question, context, answers) record.
struct QAInstance {
  std::string qid;
  std::string question;
  std::string context;
  std::vector<std::string> gold_answers;
  std::vector<Span> answer_spans;

  std::string_view SpanText(const Span& span) const {
    return std::string_view(context).substr(span.start, span.length());
  }

  friend bool operator==(const QAInstance&, const QAInstance&) = default;
};

struct Dataset {
  nlohmann::json header = nlohmann::json::object();
  std::vector<QAInstance> instances;

  std::size_t size() const { return instances.size(); }
  bool empty() const { return instances.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Returns one human-readable entry per violated invariant; empty iff valid.
inline std::vector<std::string> ValidateInstance(const QAInstance& instance) {
  std::vector<std::string> violations;
  if (instance.qid.empty()) violations.push_back("qid: empty");
  if (instance.gold_answers.empty()) {
    violations.push_back("gold_answers: empty");
  }
  std::vector<std::string> collapsed_golds;
  collapsed_golds.reserve(instance.gold_answers.size());
  for (const auto& gold : instance.gold_answers) {
    collapsed_golds.push_back(CollapseWhitespace(gold));
  }
  const std::size_t length = instance.context.size();
  for (std::size_t i = 0; i < instance.answer_spans.size(); ++i) {
    const Span& span = instance.answer_spans[i];
    const std::string field = "answer_spans[" + std::to_string(i) + "]";
    if (span.end > length) {
      violations.push_back(field + ": end > context length");
      continue;
    }
    if (span.start >= span.end) {
      violations.push_back(field + ": start >= end");
      continue;
    }
    const std::string text = CollapseWhitespace(instance.SpanText(span));
    bool found = false;
    for (const auto& gold : collapsed_golds) found = found || gold == text;
    if (!found) {
      violations.push_back(field + ": text \"" + text +
                           "\" matches no gold answer");
    }
  }
  return violations;
}

// Throws kValidation on the first instance or qid-uniqueness violation.
inline void ValidateDataset(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen;
  for (const auto& instance : dataset.instances) {
    auto violations = ValidateInstance(instance);
    if (!violations.empty()) {
      throw Error(ErrorCode::kValidation,
                  "qid \"" + instance.qid + "\": " + violations.front());
    }
    if (!seen.insert(instance.qid).second) {
      throw Error(ErrorCode::kValidation, "duplicate qid \"" + instance.qid +
                                              "\"");
    }
  }
}

// qid -> position in dataset.instances.
inline std::unordered_map<std::string, std::size_t> IndexByQid(
    const Dataset& dataset) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    index.emplace(dataset.instances[i].qid, i);
  }
  return index;
}

}  // namespace kconflict

#endif  // KCONFLICT_DATASET_HPP_
