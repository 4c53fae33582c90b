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


#ifndef KCONFLICT_TEXT_HPP_
#define KCONFLICT_TEXT_HPP_

// Byte-level text helpers shared by every module. Case folding is ASCII-only;
// bytes >= 0x80 (UTF-8 lead and continuation bytes) are left untouched and
// count as word characters, so a multi-byte letter never forms a boundary.

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kconflict {

inline char AsciiLower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

inline bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline bool IsWordByte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') ||
         (u >= 'A' && u <= 'Z') || u >= 0x80;
}

inline std::string FoldCase(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = AsciiLower(c);
  return out;
}

inline bool EqualsFolded(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (AsciiLower(a[i]) != AsciiLower(b[i])) return false;
  }
  return true;
}

// Trims and collapses every run of ASCII whitespace to one space.
inline std::string CollapseWhitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (IsAsciiSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

// One occurrence of a surface in a text: [begin, end) byte offsets plus the
// index of the surface (in the caller's list) that matched.
struct SurfaceMatch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t surface = 0;

  friend bool operator==(const SurfaceMatch&, const SurfaceMatch&) = default;
};

// Case-insensitive, word-boundary-delimited search for any of `surfaces`.
// At each candidate position the longest surface wins; matches are
// left-to-right and non-overlapping. Empty surfaces never match.
class SurfaceMatcher {
 public:
  explicit SurfaceMatcher(const std::vector<std::string>& surfaces) {
    for (std::size_t i = 0; i < surfaces.size(); ++i) {
      if (surfaces[i].empty()) continue;
      folded_.emplace_back(FoldCase(surfaces[i]), i);
    }
    std::stable_sort(folded_.begin(), folded_.end(),
                     [](const auto& a, const auto& b) {
                       return a.first.size() > b.first.size();
                     });
  }

  bool empty() const { return folded_.empty(); }

  std::vector<SurfaceMatch> FindAll(std::string_view text) const {
    std::vector<SurfaceMatch> matches;
    Scan(text, [&](const SurfaceMatch& m) {
      matches.push_back(m);
      return true;
    });
    return matches;
  }

  bool Contains(std::string_view text) const {
    bool found = false;
    Scan(text, [&](const SurfaceMatch&) {
      found = true;
      return false;
    });
    return found;
  }

 private:
  // Calls `sink(match)` per match; stops early when sink returns false.
  template <typename Sink>
  void Scan(std::string_view text, Sink&& sink) const {
    if (folded_.empty()) return;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
      if (i > 0 && IsWordByte(text[i - 1])) {
        ++i;
        continue;
      }
      const char first = AsciiLower(text[i]);
      bool matched = false;
      for (const auto& [surface, index] : folded_) {
        const std::size_t len = surface.size();
        if (surface[0] != first || len > n - i) continue;
        if (i + len < n && IsWordByte(text[i + len])) continue;
        if (!EqualsFolded(text.substr(i, len), surface)) continue;
        if (!sink(SurfaceMatch{i, i + len, index})) return;
        i += len;
        matched = true;
        break;
      }
      if (!matched) ++i;
    }
  }

  std::vector<std::pair<std::string, std::size_t>> folded_;
};

inline bool ContainsSurface(std::string_view text, std::string_view surface) {
  return SurfaceMatcher({std::string(surface)}).Contains(text);
}

// UTF-8 offset conversion. Invalid bytes count as one code point each, so the
// mapping is total for arbitrary byte strings.
inline bool IsUtf8Continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

// Returns byte offsets of every code point boundary; element i is the byte
// offset of code point i, and the last element equals text.size().
inline std::vector<std::size_t> CodepointByteOffsets(std::string_view text) {
  std::vector<std::size_t> offsets;
  offsets.reserve(text.size() + 1);
  std::size_t i = 0;
  while (i < text.size()) {
    offsets.push_back(i);
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0 && lead < 0xF8) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = lead < 0xF0 ? 3 : 1;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (len > 1) {
      if (i + len > text.size()) {
        len = 1;
      } else {
        for (std::size_t k = 1; k < len; ++k) {
          if (!IsUtf8Continuation(static_cast<unsigned char>(text[i + k]))) {
            len = 1;
            break;
          }
        }
      }
    }
    i += len;
  }
  offsets.push_back(text.size());
  return offsets;
}

}  // namespace kconflict

#endif  // KCONFLICT_TEXT_HPP_
