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


#ifndef KCONFLICT_ANSWER_MATCH_HPP_
#define KCONFLICT_ANSWER_MATCH_HPP_

// SQuAD exact-match normalization: lowercase, strip ASCII punctuation,
// drop the articles a/an/the at word boundaries, collapse whitespace.

#include <span>
#include <string>
#include <string_view>

#include "kconflict/text.hpp"

namespace kconflict {

inline bool IsAsciiPunctuation(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 33 && u <= 47) || (u >= 58 && u <= 64) ||
         (u >= 91 && u <= 96) || (u >= 123 && u <= 126);
}

inline std::string NormalizeAnswer(std::string_view text) {
  std::string stripped;
  stripped.reserve(text.size());
  for (char c : text) {
    if (!IsAsciiPunctuation(c)) stripped.push_back(AsciiLower(c));
  }
  // Articles are replaced by a space, as the reference regex does.
  std::string no_articles;
  no_articles.reserve(stripped.size());
  const std::size_t n = stripped.size();
  std::size_t i = 0;
  while (i < n) {
    if (i == 0 || !IsWordByte(stripped[i - 1])) {
      std::size_t len = 0;
      for (std::string_view article : {"the", "an", "a"}) {
        if (stripped.compare(i, article.size(), article) == 0 &&
            (i + article.size() == n ||
             !IsWordByte(stripped[i + article.size()]))) {
          len = article.size();
          break;
        }
      }
      if (len > 0) {
        no_articles.push_back(' ');
        i += len;
        continue;
      }
    }
    no_articles.push_back(stripped[i]);
    ++i;
  }
  return CollapseWhitespace(no_articles);
}

inline bool ExactMatch(std::string_view prediction,
                       std::span<const std::string> golds) {
  const std::string normalized = NormalizeAnswer(prediction);
  for (const auto& gold : golds) {
    if (NormalizeAnswer(gold) == normalized) return true;
  }
  return false;
}

inline bool ExactMatch(std::string_view prediction, std::string_view gold) {
  return NormalizeAnswer(prediction) == NormalizeAnswer(gold);
}

}  // namespace kconflict

#endif  // KCONFLICT_ANSWER_MATCH_HPP_
