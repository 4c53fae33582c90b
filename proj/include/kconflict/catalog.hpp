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


#ifndef KCONFLICT_CATALOG_HPP_
#define KCONFLICT_CATALOG_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "kconflict/entity_type.hpp"
#include "kconflict/error.hpp"
#include "kconflict/jsonl.hpp"
#include "kconflict/line_io.hpp"
#include "kconflict/rng.hpp"
#include "kconflict/text.hpp"

namespace kconflict {

struct CatalogEntity {
  std::string id;
  std::string name;
  EntityType type = EntityType::kPer;
  std::uint64_t popularity = 0;  // monthly page views
  std::vector<std::string> aliases;

  friend bool operator==(const CatalogEntity&, const CatalogEntity&) = default;
};

// [lower, upper) over popularity; no upper means unbounded above.
struct PopularityRange {
  std::uint64_t lower = 0;
  std::optional<std::uint64_t> upper;

  bool Contains(std::uint64_t popularity) const {
    return popularity >= lower && (!upper || popularity < *upper);
  }
  bool IsValid() const { return !upper || lower < *upper; }

  friend bool operator==(const PopularityRange&,
                         const PopularityRange&) = default;
};

struct PopularityBucket {
  std::size_t index = 0;
  PopularityRange range;
  std::size_t member_count = 0;

  friend bool operator==(const PopularityBucket&,
                         const PopularityBucket&) = default;
};

// Immutable after construction; every query is safe to call concurrently.
class EntityCatalog {
 public:
  EntityCatalog() { BuildIndexes(); }

  // Validates ids, repairs alias lists (aliases equal to the name or
  // case-fold duplicates of earlier aliases are dropped with a warning) and
  // builds the indexes.
  explicit EntityCatalog(std::vector<CatalogEntity> entities)
      : entities_(std::move(entities)) {
    std::unordered_set<std::string> ids;
    for (auto& entity : entities_) {
      if (entity.id.empty()) {
        throw Error(ErrorCode::kSchema, "catalog entity with empty id");
      }
      if (!ids.insert(entity.id).second) {
        throw Error(ErrorCode::kConflict,
                    "duplicate catalog id \"" + entity.id + "\"");
      }
      RepairAliases(entity);
    }
    BuildIndexes();
  }

  static EntityCatalog Load(LineReader& lines) {
    namespace f = json_fields;
    std::vector<CatalogEntity> entities;
    ForEachJsonLine(lines, [&](const nlohmann::json& row, std::size_t ln) {
      CatalogEntity entity;
      entity.id = f::String(row, "id", ln);
      entity.name = f::String(row, "name", ln);
      const std::string type = f::String(row, "type", ln);
      auto parsed = ParseEntityType(type);
      if (!parsed) {
        throw Error(ErrorCode::kSchema, "unknown entity_type \"" + type +
                                            "\"" + f::Context(ln));
      }
      entity.type = *parsed;
      auto popularity = f::OptionalCount(row, "popularity", ln);
      if (!popularity) {
        throw Error(ErrorCode::kSchema,
                    "field \"popularity\" missing" + f::Context(ln));
      }
      entity.popularity = *popularity;
      if (auto it = row.find("aliases"); it != row.end() && !it->is_null()) {
        if (!it->is_array()) {
          throw Error(ErrorCode::kSchema,
                      "field \"aliases\" must be an array" + f::Context(ln));
        }
        for (const auto& alias : *it) {
          if (!alias.is_string()) {
            throw Error(ErrorCode::kSchema,
                        "non-string alias" + f::Context(ln));
          }
          entity.aliases.push_back(alias.get<std::string>());
        }
      }
      entities.push_back(std::move(entity));
    });
    return EntityCatalog(std::move(entities));
  }

  static EntityCatalog LoadFile(const std::string& path) {
    LineReader lines(path);
    return Load(lines);
  }

  std::size_t size() const { return entities_.size(); }
  const std::vector<CatalogEntity>& entities() const { return entities_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const CatalogEntity* Find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &entities_[it->second];
  }

  const CatalogEntity& Get(std::string_view id) const {
    const CatalogEntity* entity = Find(id);
    if (entity == nullptr) {
      throw Error(ErrorCode::kNotFound,
                  "catalog id \"" + std::string(id) + "\"");
    }
    return *entity;
  }

  // Aliases in load order, never including the canonical name.
  const std::vector<std::string>& AliasesOf(std::string_view id) const {
    return Get(id).aliases;
  }

  // Entities whose name or an alias equals `surface` case-insensitively,
  // most popular first (ties by id).
  std::vector<const CatalogEntity*> LookupSurface(
      std::string_view surface) const {
    std::vector<const CatalogEntity*> out;
    auto it = by_surface_.find(FoldCase(surface));
    if (it == by_surface_.end()) return out;
    for (std::size_t idx : it->second) out.push_back(&entities_[idx]);
    return out;
  }

  // Entities of `type` in (popularity, id) ascending order.
  std::vector<const CatalogEntity*> OfType(EntityType type) const {
    std::vector<const CatalogEntity*> out;
    for (std::size_t idx : by_type_[Index(type)]) {
      out.push_back(&entities_[idx]);
    }
    return out;
  }

  std::size_t CountOfType(EntityType type) const {
    return by_type_[Index(type)].size();
  }

  // Splits the entities of `type`, ordered by (popularity, id), into k
  // contiguous groups whose sizes differ by at most one (the first
  // population % k groups get the extra member). Bucket lower bounds are
  // the popularity of the first member; upper bounds are the next bucket's
  // lower bound, and the last bucket is unbounded.
  std::vector<PopularityBucket> ComputeBuckets(EntityType type,
                                               std::size_t k) const {
    if (k == 0) {
      throw Error(ErrorCode::kInvalidArgument, "bucket count must be positive");
    }
    const auto& members = by_type_[Index(type)];
    if (members.size() < k) {
      throw Error(ErrorCode::kInsufficient,
                  std::to_string(members.size()) + " " +
                      std::string(EntityTypeName(type)) +
                      " entities cannot fill " + std::to_string(k) +
                      " buckets");
    }
    const std::size_t base = members.size() / k;
    const std::size_t extra = members.size() % k;
    std::vector<PopularityBucket> buckets(k);
    std::size_t begin = 0;
    for (std::size_t b = 0; b < k; ++b) {
      buckets[b].index = b;
      buckets[b].member_count = base + (b < extra ? 1 : 0);
      buckets[b].range.lower = entities_[members[begin]].popularity;
      begin += buckets[b].member_count;
    }
    for (std::size_t b = 0; b + 1 < k; ++b) {
      buckets[b].range.upper = buckets[b + 1].range.lower;
    }
    return buckets;
  }

  // Uniform draw over entities of `type` with popularity in `range`.
  const CatalogEntity& SampleEntity(EntityType type,
                                    const PopularityRange& range,
                                    Rng& rng) const {
    return SampleEntity(type, range, rng, nullptr);
  }

  // As above, restricted to entities for which `exclude` returns false.
  const CatalogEntity& SampleEntity(
      EntityType type, const PopularityRange& range, Rng& rng,
      const std::function<bool(const CatalogEntity&)>& exclude) const {
    const auto [first, last] = QualifyingRange(type, range);
    if (first == last) {
      throw Error(ErrorCode::kEmptyRange, DescribeRange(type, range));
    }
    const auto& members = by_type_[Index(type)];
    const std::size_t n = last - first;
    if (!exclude) return entities_[members[first + rng.UniformIndex(n)]];
    // Rejection sampling, then an exhaustive pass; both stages are uniform
    // over the non-excluded set.
    constexpr int kAttempts = 32;
    for (int attempt = 0; attempt < kAttempts; ++attempt) {
      const CatalogEntity& e = entities_[members[first + rng.UniformIndex(n)]];
      if (!exclude(e)) return e;
    }
    std::vector<std::size_t> allowed;
    for (std::size_t i = first; i < last; ++i) {
      if (!exclude(entities_[members[i]])) allowed.push_back(members[i]);
    }
    if (allowed.empty()) {
      throw Error(ErrorCode::kEmptyRange,
                  DescribeRange(type, range) + " after exclusions");
    }
    return entities_[allowed[rng.UniformIndex(allowed.size())]];
  }

  // Number of entities of `type` inside `range`.
  std::size_t CountInRange(EntityType type, const PopularityRange& range) const {
    const auto [first, last] = QualifyingRange(type, range);
    return last - first;
  }

  // Rebuilds every index from the entity list and compares.
  bool IndexesConsistent() const {
    EntityCatalog copy;
    copy.entities_ = entities_;
    copy.BuildIndexes();
    return copy.by_id_ == by_id_ && copy.by_type_ == by_type_ &&
           copy.by_surface_ == by_surface_;
  }

 private:
  void RepairAliases(CatalogEntity& entity) {
    std::unordered_set<std::string> seen = {FoldCase(entity.name)};
    std::vector<std::string> kept;
    for (auto& alias : entity.aliases) {
      if (!seen.insert(FoldCase(alias)).second) {
        warnings_.push_back("entity \"" + entity.id + "\": dropped alias \"" +
                            alias + "\" duplicating its name or another alias");
        continue;
      }
      kept.push_back(std::move(alias));
    }
    entity.aliases = std::move(kept);
  }

  void BuildIndexes() {
    by_id_.clear();
    by_surface_.clear();
    for (auto& list : by_type_) list.clear();
    for (std::size_t i = 0; i < entities_.size(); ++i) {
      const CatalogEntity& e = entities_[i];
      by_id_.emplace(e.id, i);
      by_type_[Index(e.type)].push_back(i);
      std::unordered_set<std::string> surfaces = {FoldCase(e.name)};
      for (const auto& alias : e.aliases) surfaces.insert(FoldCase(alias));
      for (const auto& s : surfaces) by_surface_[s].push_back(i);
    }
    for (auto& list : by_type_) {
      std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        return std::tie(entities_[a].popularity, entities_[a].id) <
               std::tie(entities_[b].popularity, entities_[b].id);
      });
    }
    for (auto& [surface, list] : by_surface_) {
      std::sort(list.begin(), list.end(), [&](std::size_t a, std::size_t b) {
        if (entities_[a].popularity != entities_[b].popularity) {
          return entities_[a].popularity > entities_[b].popularity;
        }
        return entities_[a].id < entities_[b].id;
      });
    }
  }

  // [first, last) positions in by_type_[type] whose popularity is in range.
  std::pair<std::size_t, std::size_t> QualifyingRange(
      EntityType type, const PopularityRange& range) const {
    const auto& members = by_type_[Index(type)];
    auto pop_less = [&](std::size_t idx, std::uint64_t value) {
      return entities_[idx].popularity < value;
    };
    const auto first = static_cast<std::size_t>(
        std::lower_bound(members.begin(), members.end(), range.lower,
                         pop_less) -
        members.begin());
    std::size_t last = members.size();
    if (range.upper) {
      last = static_cast<std::size_t>(
          std::lower_bound(members.begin(), members.end(), *range.upper,
                           pop_less) -
          members.begin());
    }
    return {first, std::max(first, last)};
  }

  static std::string DescribeRange(EntityType type,
                                   const PopularityRange& range) {
    return "no " + std::string(EntityTypeName(type)) +
           " entity with popularity in [" + std::to_string(range.lower) +
           ", " + (range.upper ? std::to_string(*range.upper) : "inf") + ")";
  }

  std::vector<CatalogEntity> entities_;
  std::vector<std::string> warnings_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::array<std::vector<std::size_t>, kNumEntityTypes> by_type_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_surface_;
};

}  // namespace kconflict

#endif  // KCONFLICT_CATALOG_HPP_
