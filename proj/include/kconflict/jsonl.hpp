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


#ifndef KCONFLICT_JSONL_HPP_
#define KCONFLICT_JSONL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "kconflict/error.hpp"
#include "kconflict/line_io.hpp"

namespace kconflict {

// Calls fn(object, line_number) for every non-blank line of a JSONL stream.
template <typename Fn>
void ForEachJsonLine(LineReader& lines, Fn&& fn) {
  std::string line;
  while (lines.Next(line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kParse, lines.name() + " line " +
                                         std::to_string(lines.line_number()) +
                                         ": " + e.what());
    }
    if (!value.is_object()) {
      throw Error(ErrorCode::kSchema, lines.name() + " line " +
                                          std::to_string(lines.line_number()) +
                                          ": expected a JSON object");
    }
    fn(value, lines.line_number());
  }
}

inline std::string DumpJson(const nlohmann::json& value) {
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

namespace json_fields {

inline std::string Context(std::size_t line) {
  return " (line " + std::to_string(line) + ")";
}

inline std::string String(const nlohmann::json& object, const char* field,
                          std::size_t line) {
  auto it = object.find(field);
  if (it == object.end() || !it->is_string()) {
    throw Error(ErrorCode::kSchema, "field \"" + std::string(field) +
                                        "\" missing or not a string" +
                                        Context(line));
  }
  return it->get<std::string>();
}

inline std::optional<std::string> OptionalString(const nlohmann::json& object,
                                                 const char* field,
                                                 std::size_t line) {
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::kSchema, "field \"" + std::string(field) +
                                        "\" must be a string" + Context(line));
  }
  return it->get<std::string>();
}

// Non-negative integer; negative values and non-integers are schema errors.
inline std::optional<std::uint64_t> OptionalCount(const nlohmann::json& object,
                                                  const char* field,
                                                  std::size_t line) {
  auto it = object.find(field);
  if (it == object.end() || it->is_null()) return std::nullopt;
  if (it->is_number_unsigned()) return it->get<std::uint64_t>();
  if (it->is_number_integer()) {
    throw Error(ErrorCode::kSchema, "field \"" + std::string(field) +
                                        "\" must be non-negative" +
                                        Context(line));
  }
  throw Error(ErrorCode::kSchema, "field \"" + std::string(field) +
                                      "\" must be an integer" + Context(line));
}

}  // namespace json_fields

}  // namespace kconflict

#endif  // KCONFLICT_JSONL_HPP_
