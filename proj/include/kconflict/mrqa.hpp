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


#ifndef KCONFLICT_MRQA_HPP_
#define KCONFLICT_MRQA_HPP_

// MRQA shared-task JSONL. Line 1 is {"header": {...}}; every later line holds
// one context and its qas. Each qa becomes one QAInstance (context copied).
// On disk char_spans are inclusive code point offsets; in memory spans are
// half-open byte offsets.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "kconflict/dataset.hpp"
#include "kconflict/error.hpp"
#include "kconflict/line_io.hpp"
#include "kconflict/text.hpp"

namespace kconflict {

namespace mrqa_internal {

inline const nlohmann::json& RequireField(const nlohmann::json& object,
                                          const char* field,
                                          const std::string& where) {
  auto it = object.find(field);
  if (it == object.end()) {
    throw Error(ErrorCode::kSchema,
                "missing field \"" + std::string(field) + "\" " + where);
  }
  return *it;
}

inline std::string RequireString(const nlohmann::json& object,
                                 const char* field, const std::string& where) {
  const auto& value = RequireField(object, field, where);
  if (!value.is_string()) {
    throw Error(ErrorCode::kSchema,
                "field \"" + std::string(field) + "\" must be a string " +
                    where);
  }
  return value.get<std::string>();
}

inline std::string Where(std::size_t line, const std::string& qid = {}) {
  std::string out = "(line " + std::to_string(line);
  if (!qid.empty()) out += ", qid \"" + qid + "\"";
  return out + ")";
}

}  // namespace mrqa_internal

// Streams a MRQA file one context line at a time.
class MrqaReader {
 public:
  explicit MrqaReader(LineReader& lines) : lines_(lines) {
    std::string line;
    if (!lines_.Next(line)) {
      throw Error(ErrorCode::kSchema, "missing header line in " + lines_.name());
    }
    const auto parsed = ParseLine(line);
    auto it = parsed.find("header");
    if (!parsed.is_object() || it == parsed.end()) {
      throw Error(ErrorCode::kSchema, "first line of " + lines_.name() +
                                          " has no \"header\" object");
    }
    header_ = *it;
  }

  const nlohmann::json& header() const { return header_; }

  // Replaces `out` with the instances of the next context line. Blank lines
  // are skipped. Returns false at end of stream.
  bool Next(std::vector<QAInstance>& out) {
    using mrqa_internal::RequireField;
    using mrqa_internal::RequireString;
    using mrqa_internal::Where;
    out.clear();
    std::string line;
    do {
      if (!lines_.Next(line)) return false;
    } while (line.find_first_not_of(" \t") == std::string::npos);
    const std::size_t ln = lines_.line_number();
    const auto record = ParseLine(line);
    if (!record.is_object()) {
      throw Error(ErrorCode::kSchema, "line is not an object " + Where(ln));
    }
    std::string context = RequireString(record, "context", Where(ln));
    const auto& qas = RequireField(record, "qas", Where(ln));
    if (!qas.is_array()) {
      throw Error(ErrorCode::kSchema, "\"qas\" must be an array " + Where(ln));
    }
    const std::vector<std::size_t> offsets = CodepointByteOffsets(context);
    const std::size_t n_codepoints = offsets.size() - 1;
    for (const auto& qa : qas) {
      QAInstance instance;
      instance.qid = RequireString(qa, "qid", Where(ln));
      if (instance.qid.empty()) {
        throw Error(ErrorCode::kSchema, "empty qid " + Where(ln));
      }
      const std::string where = Where(ln, instance.qid);
      instance.question = RequireString(qa, "question", where);
      const auto& answers = RequireField(qa, "answers", where);
      if (!answers.is_array()) {
        throw Error(ErrorCode::kSchema, "\"answers\" must be an array " + where);
      }
      if (answers.empty()) {
        throw Error(ErrorCode::kSchema, "gold_answers empty " + where);
      }
      for (const auto& answer : answers) {
        if (!answer.is_string()) {
          throw Error(ErrorCode::kSchema, "non-string answer " + where);
        }
        instance.gold_answers.push_back(answer.get<std::string>());
      }
      const auto& detected = RequireField(qa, "detected_answers", where);
      if (!detected.is_array()) {
        throw Error(ErrorCode::kSchema,
                    "\"detected_answers\" must be an array " + where);
      }
      for (const auto& answer : detected) {
        const auto& spans = RequireField(answer, "char_spans", where);
        if (!spans.is_array()) {
          throw Error(ErrorCode::kSchema,
                      "\"char_spans\" must be an array " + where);
        }
        for (const auto& span : spans) {
          if (!span.is_array() || span.size() != 2 ||
              !span[0].is_number_integer() || !span[1].is_number_integer()) {
            throw Error(ErrorCode::kSchema,
                        "char span must be [start, end] " + where);
          }
          const auto first = span[0].get<long long>();
          const auto last = span[1].get<long long>();
          if (first < 0 || last < first ||
              static_cast<std::size_t>(last) >= n_codepoints) {
            throw Error(ErrorCode::kValidation,
                        "char span [" + std::to_string(first) + ", " +
                            std::to_string(last) +
                            "] out of bounds for context of " +
                            std::to_string(n_codepoints) + " chars " + where);
          }
          instance.answer_spans.push_back(
              Span{offsets[static_cast<std::size_t>(first)],
                   offsets[static_cast<std::size_t>(last) + 1]});
        }
      }
      instance.context = context;
      out.push_back(std::move(instance));
    }
    return true;
  }

 private:
  nlohmann::json ParseLine(const std::string& line) {
    try {
      return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, lines_.name() + " line " +
                                         std::to_string(lines_.line_number()) +
                                         ": " + e.what());
    }
  }

  LineReader& lines_;
  nlohmann::json header_;
};

inline Dataset ParseMrqa(LineReader& lines) {
  MrqaReader reader(lines);
  Dataset dataset;
  dataset.header = reader.header();
  std::unordered_set<std::string> qids;
  std::vector<QAInstance> batch;
  while (reader.Next(batch)) {
    for (auto& instance : batch) {
      if (!qids.insert(instance.qid).second) {
        throw Error(ErrorCode::kValidation,
                    "duplicate qid \"" + instance.qid + "\" in " + lines.name());
      }
      dataset.instances.push_back(std::move(instance));
    }
  }
  return dataset;
}

inline Dataset ParseMrqa(std::istream& in, bool gzipped) {
  LineReader lines(in, gzipped);
  return ParseMrqa(lines);
}

inline Dataset ReadMrqaFile(const std::string& path) {
  LineReader lines(path);
  return ParseMrqa(lines);
}

namespace mrqa_internal {

inline std::string Dump(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

inline nlohmann::json QaToJson(const QAInstance& instance,
                               const std::vector<std::size_t>& offsets) {
  auto to_codepoint = [&](std::size_t byte) -> std::size_t {
    auto it = std::lower_bound(offsets.begin(), offsets.end(), byte);
    if (it == offsets.end() || *it != byte) {
      throw Error(ErrorCode::kValidation,
                  "span offset " + std::to_string(byte) +
                      " splits a UTF-8 sequence (qid \"" + instance.qid + "\")");
    }
    return static_cast<std::size_t>(it - offsets.begin());
  };
  nlohmann::json detected = nlohmann::json::array();
  for (const Span& span : instance.answer_spans) {
    if (span.start >= span.end || span.end > instance.context.size()) {
      throw Error(ErrorCode::kValidation,
                  "invalid span for qid \"" + instance.qid + "\"");
    }
    const std::size_t first = to_codepoint(span.start);
    const std::size_t last = to_codepoint(span.end) - 1;
    detected.push_back({{"text", std::string(instance.SpanText(span))},
                        {"char_spans", {{first, last}}}});
  }
  return {{"qid", instance.qid},
          {"question", instance.question},
          {"answers", instance.gold_answers},
          {"detected_answers", std::move(detected)}};
}

}  // namespace mrqa_internal

// Consecutive instances sharing a context are written as one line, so the
// output re-parses to the same instance sequence.
inline void WriteMrqa(const Dataset& dataset, LineWriter& out) {
  using mrqa_internal::Dump;
  out.Write(Dump(nlohmann::json{{"header", dataset.header}}));
  const auto& instances = dataset.instances;
  std::size_t i = 0;
  while (i < instances.size()) {
    const std::string& context = instances[i].context;
    const auto offsets = CodepointByteOffsets(context);
    nlohmann::json qas = nlohmann::json::array();
    std::size_t j = i;
    for (; j < instances.size() && instances[j].context == context; ++j) {
      qas.push_back(mrqa_internal::QaToJson(instances[j], offsets));
    }
    out.Write(Dump(nlohmann::json{{"context", context}, {"qas", std::move(qas)}}));
    i = j;
  }
}

inline void WriteMrqa(const Dataset& dataset, std::ostream& out, bool gzipped) {
  LineWriter writer(out, gzipped);
  WriteMrqa(dataset, writer);
  writer.Close();
}

inline void WriteMrqaFile(const Dataset& dataset, const std::string& path) {
  LineWriter writer(path);
  WriteMrqa(dataset, writer);
  writer.Close();
}

}  // namespace kconflict

#endif  // KCONFLICT_MRQA_HPP_
