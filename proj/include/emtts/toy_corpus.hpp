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

#ifndef EMTTS_TOY_CORPUS_HPP_
#define EMTTS_TOY_CORPUS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "emtts/dsp.hpp"

namespace emtts {

// Five short synthetic utterances over the alphabet a..e. Every character
// renders as a fixed two-partial tone segment (distinct pitch and formant
// per character), so text/audio alignment is genuinely learnable at desk
// scale. Deterministic in `seed`.
std::vector<std::pair<std::string, std::string>> toy_corpus_texts();

Waveform render_toy_utterance(const std::string& transcript, uint64_t seed);

// Writes <id>.wav files plus metadata.tsv into `dir`.
void make_toy_corpus(const std::string& dir, uint64_t seed);

}  // namespace emtts

#endif  // EMTTS_TOY_CORPUS_HPP_
