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

#ifndef EMTTS_VOCAB_HPP_
#define EMTTS_VOCAB_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "emtts/common.hpp"

namespace emtts {

// Decodes UTF-8 into code points; throws on malformed input.
std::vector<uint32_t> utf8_decode(const std::string& s);
std::string utf8_encode(uint32_t cp);

// Character-level symbol table. Index 0 is PAD, index 1 is EOS; the
// remaining indices are the corpus characters in sorted code point order,
// so the table is independent of transcript order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kEos = 1;

  Vocabulary() = default;
  static Vocabulary from_texts(const std::vector<std::string>& texts);
  static Vocabulary from_codepoints(std::vector<uint32_t> sorted_cps);

  int size() const { return 2 + static_cast<int>(cps_.size()); }
  const std::vector<uint32_t>& codepoints() const { return cps_; }
  bool knows(uint32_t cp) const { return index_.count(cp) > 0; }
  int index_of(uint32_t cp) const;

  // Code points + trailing EOS. Unknown characters raise an error that
  // lists every offending character.
  std::vector<int> tokenize(const std::string& text) const;

 private:
  std::vector<uint32_t> cps_;
  std::unordered_map<uint32_t, int> index_;
};

}  // namespace emtts

#endif  // EMTTS_VOCAB_HPP_
