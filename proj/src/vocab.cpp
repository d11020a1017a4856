// Copyright (c) 2026 The emtts Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emtts/vocab.hpp"

#include <algorithm>
#include <set>

namespace emtts {

std::vector<uint32_t> utf8_decode(const std::string& s) {
  std::vector<uint32_t> out;
  size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra;
    uint32_t cp;
    if (b0 < 0x80) {
      extra = 0;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      extra = 1;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      extra = 2;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      extra = 3;
      cp = b0 & 0x07;
    } else {
      throw Error("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    EMTTS_CHECK(i + extra < s.size(), "truncated UTF-8 sequence at offset " << i);
    for (int j = 1; j <= extra; ++j) {
      const auto b = static_cast<unsigned char>(s[i + j]);
      EMTTS_CHECK((b & 0xC0) == 0x80, "invalid UTF-8 continuation byte at offset " << i + j);
      cp = (cp << 6) | (b & 0x3F);
    }
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode(uint32_t cp) {
  std::string s;
  if (cp < 0x80) {
    s += static_cast<char>(cp);
  } else if (cp < 0x800) {
    s += static_cast<char>(0xC0 | (cp >> 6));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    s += static_cast<char>(0xE0 | (cp >> 12));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    s += static_cast<char>(0xF0 | (cp >> 18));
    s += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    s += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    s += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return s;
}

Vocabulary Vocabulary::from_texts(const std::vector<std::string>& texts) {
  std::set<uint32_t> seen;
  for (const auto& t : texts)
    for (uint32_t cp : utf8_decode(t)) seen.insert(cp);
  return from_codepoints(std::vector<uint32_t>(seen.begin(), seen.end()));
}

Vocabulary Vocabulary::from_codepoints(std::vector<uint32_t> sorted_cps) {
  EMTTS_CHECK(std::is_sorted(sorted_cps.begin(), sorted_cps.end()),
              "vocabulary code points must be sorted");
  Vocabulary v;
  v.cps_ = std::move(sorted_cps);
  for (size_t i = 0; i < v.cps_.size(); ++i) {
    EMTTS_CHECK(!v.index_.count(v.cps_[i]), "duplicate vocabulary code point");
    v.index_[v.cps_[i]] = static_cast<int>(i) + 2;
  }
  return v;
}

int Vocabulary::index_of(uint32_t cp) const {
  auto it = index_.find(cp);
  EMTTS_CHECK(it != index_.end(), "character not in vocabulary: '" << utf8_encode(cp) << "'");
  return it->second;
}

std::vector<int> Vocabulary::tokenize(const std::string& text) const {
  const auto cps = utf8_decode(text);
  EMTTS_CHECK(!cps.empty(), "cannot tokenize empty text");
  std::string unknown;
  for (uint32_t cp : cps)
    if (!knows(cp)) unknown += utf8_encode(cp);
  EMTTS_CHECK(unknown.empty(), "characters not in vocabulary: \"" << unknown << "\"");
  std::vector<int> ids;
  ids.reserve(cps.size() + 1);
  for (uint32_t cp : cps) ids.push_back(index_.at(cp));
  ids.push_back(kEos);
  return ids;
}

}  // namespace emtts
