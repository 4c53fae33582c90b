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


#ifndef KCONFLICT_ENTITY_TYPE_HPP_
#define KCONFLICT_ENTITY_TYPE_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace kconflict {

// The five answer types substitutions are defined over.
enum class EntityType { kPer = 0, kDat, kNum, kOrg, kLoc };

inline constexpr std::size_t kNumEntityTypes = 5;

inline constexpr std::array<EntityType, kNumEntityTypes> kAllEntityTypes = {
    EntityType::kPer, EntityType::kDat, EntityType::kNum, EntityType::kOrg,
    EntityType::kLoc};

inline constexpr std::size_t Index(EntityType type) {
  return static_cast<std::size_t>(type);
}

inline constexpr std::string_view EntityTypeName(EntityType type) {
  constexpr std::array<std::string_view, kNumEntityTypes> kNames = {
      "PER", "DAT", "NUM", "ORG", "LOC"};
  return kNames[Index(type)];
}

inline std::optional<EntityType> ParseEntityType(std::string_view name) {
  for (EntityType type : kAllEntityTypes) {
    if (EntityTypeName(type) == name) return type;
  }
  return std::nullopt;
}

// DAT and NUM answers are numeric; the rest are textual.
inline constexpr bool IsNumericType(EntityType type) {
  return type == EntityType::kDat || type == EntityType::kNum;
}

}  // namespace kconflict

#endif  // KCONFLICT_ENTITY_TYPE_HPP_
