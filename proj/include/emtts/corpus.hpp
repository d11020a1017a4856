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

#ifndef EMTTS_CORPUS_HPP_
#define EMTTS_CORPUS_HPP_

#include <string>
#include <vector>

#include "emtts/augment.hpp"
#include "emtts/dsp.hpp"
#include "emtts/vocab.hpp"

namespace emtts {

struct CorpusEntry {
  std::string id;
  std::string transcript;
  std::string coarse_path;     // coarse mel cache (EMSP)
  std::string full_path;       // SSRN target cache (EMSP); empty for augmented entries
  std::string split;           // "train" | "val"
  std::string augmented_from;  // source id; empty for originals

  bool has_full() const { return !full_path.empty(); }
};

struct CorpusIndex {
  std::string root;
  Vocabulary vocab;
  std::vector<CorpusEntry> entries;

  std::vector<const CorpusEntry*> select(const std::string& split, bool require_full) const;
};

struct BuildReport {
  int built = 0;
  int cached = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> row_errors;
};

// Reads `id<TAB>transcript` rows, computes and caches the spectrogram pair
// per clip (skipping files that already carry a valid cache), builds the
// character vocabulary, and splits train/validation 80/20 by id hash.
// Unusable rows are collected in the report; with `strict` any bad row
// fails the build.
CorpusIndex build_corpus(const std::string& metadata_tsv, const std::string& wav_dir,
                         const std::string& out_dir, const DspConfig& cfg, bool strict,
                         BuildReport* report = nullptr);

CorpusIndex load_corpus(const std::string& dir);

// Writes index.tsv and vocab.tsv under index.root.
void save_corpus_index(const CorpusIndex& index);

// Offline dataset expansion: every input entry yields expansion_factor - 1
// augmented coarse-mel variants (text unchanged, split inherited).
// Deterministic in `seed`; variants carry no SSRN target.
CorpusIndex expand_corpus(const CorpusIndex& input, const std::string& out_dir,
                          const AugmentPolicy& policy, uint64_t seed);

}  // namespace emtts

#endif  // EMTTS_CORPUS_HPP_
