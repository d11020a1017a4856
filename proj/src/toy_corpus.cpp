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

#include "emtts/toy_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace emtts {

namespace {

constexpr real kCharSeconds = 0.28;
constexpr real kLeadSeconds = 0.08;

struct CharVoice {
  real pitch;
  real formant;
};

CharVoice voice_for(char c) {
  const int idx = c - 'a';
  return {130.0 + 28.0 * idx, 700.0 + 260.0 * idx};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> toy_corpus_texts() {
  return {
      {"toy0", "abcde"}, {"toy1", "edcba"}, {"toy2", "bacde"},
      {"toy3", "deabc"}, {"toy4", "cdeab"},
  };
}

Waveform render_toy_utterance(const std::string& transcript, uint64_t seed) {
  const int lead = static_cast<int>(kLeadSeconds * kSampleRate);
  const int per_char = static_cast<int>(kCharSeconds * kSampleRate);
  const int total = 2 * lead + per_char * static_cast<int>(transcript.size());
  Waveform w;
  w.samples.assign(static_cast<size_t>(total), 0.0);
  // Background stays digitally silent: normalized spectrogram targets then
  // sit exactly at the dB floor outside the tones, which keeps the binary
  // divergence floor of the corpus low. The seed is reserved for future
  // corpus variants.
  (void)seed;

  for (size_t ci = 0; ci < transcript.size(); ++ci) {
    const char c = transcript[ci];
    EMTTS_CHECK(c >= 'a' && c <= 'e', "toy corpus transcripts use a..e only, got '" << c << "'");
    const CharVoice v = voice_for(c);
    const int off = lead + static_cast<int>(ci) * per_char;
    for (int i = 0; i < per_char; ++i) {
      const real t = static_cast<real>(i) / kSampleRate;
      // raised-cosine onset/offset so segments don't click
      const real edge = 0.02 * kSampleRate;
      real env = 1.0;
      if (i < edge) env = 0.5 - 0.5 * std::cos(M_PI * i / edge);
      if (i > per_char - edge)
        env = 0.5 - 0.5 * std::cos(M_PI * (per_char - i) / edge);
      const real s = 0.45 * std::sin(2.0 * M_PI * v.pitch * t) +
                     0.22 * std::sin(2.0 * M_PI * 2.0 * v.pitch * t) +
                     0.18 * std::sin(2.0 * M_PI * v.formant * t);
      w.samples[static_cast<size_t>(off + i)] = std::clamp(env * s, -1.0, 1.0);
    }
  }
  return w;
}

void make_toy_corpus(const std::string& dir, uint64_t seed) {
  fs::create_directories(dir);
  std::ofstream meta(fs::path(dir) / "metadata.tsv");
  EMTTS_CHECK(meta.good(), "cannot write toy corpus metadata in " << dir);
  for (const auto& [id, text] : toy_corpus_texts()) {
    save_wav((fs::path(dir) / (id + ".wav")).string(), render_toy_utterance(text, seed));
    meta << id << '\t' << text << '\n';
  }
}

}  // namespace emtts
