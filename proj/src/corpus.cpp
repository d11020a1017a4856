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

#include "emtts/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace emtts {

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string col;
  while (std::getline(ss, col, '\t')) cols.push_back(col);
  return cols;
}

std::string field_or_empty(const std::string& s) { return s == "-" ? "" : s; }
std::string field_or_dash(const std::string& s) { return s.empty() ? "-" : s; }

}  // namespace

std::vector<const CorpusEntry*> CorpusIndex::select(const std::string& split,
                                                    bool require_full) const {
  std::vector<const CorpusEntry*> out;
  for (const auto& e : entries) {
    if (!split.empty() && e.split != split) continue;
    if (require_full && !e.has_full()) continue;
    out.push_back(&e);
  }
  return out;
}

void save_corpus_index(const CorpusIndex& index) {
  fs::create_directories(index.root);
  {
    std::ofstream out(fs::path(index.root) / "index.tsv");
    EMTTS_CHECK(out.good(), "cannot write corpus index in " << index.root);
    out << "# id\ttranscript\tcoarse\tfull\tsplit\taugmented_from\n";
    for (const auto& e : index.entries) {
      out << e.id << '\t' << e.transcript << '\t' << e.coarse_path << '\t'
          << field_or_dash(e.full_path) << '\t' << e.split << '\t'
          << field_or_dash(e.augmented_from) << '\n';
    }
  }
  {
    std::ofstream out(fs::path(index.root) / "vocab.tsv");
    EMTTS_CHECK(out.good(), "cannot write vocabulary in " << index.root);
    out << "0\tPAD\n1\tEOS\n";
    const auto& cps = index.vocab.codepoints();
    for (size_t i = 0; i < cps.size(); ++i) out << i + 2 << '\t' << cps[i] << '\n';
  }
}

CorpusIndex load_corpus(const std::string& dir) {
  CorpusIndex index;
  index.root = dir;
  {
    std::ifstream in(fs::path(dir) / "vocab.tsv");
    EMTTS_CHECK(in.good(), "cannot open vocabulary: " << dir << "/vocab.tsv");
    std::vector<uint32_t> cps;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto cols = split_tsv(line);
      EMTTS_CHECK(cols.size() == 2, dir << "/vocab.tsv: malformed line '" << line << "'");
      if (cols[1] == "PAD" || cols[1] == "EOS") continue;
      cps.push_back(static_cast<uint32_t>(std::stoul(cols[1])));
    }
    index.vocab = Vocabulary::from_codepoints(std::move(cps));
  }
  {
    std::ifstream in(fs::path(dir) / "index.tsv");
    EMTTS_CHECK(in.good(), "cannot open corpus index: " << dir << "/index.tsv");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto cols = split_tsv(line);
      EMTTS_CHECK(cols.size() == 6, dir << "/index.tsv: malformed line '" << line << "'");
      CorpusEntry e;
      e.id = cols[0];
      e.transcript = cols[1];
      e.coarse_path = cols[2];
      e.full_path = field_or_empty(cols[3]);
      e.split = cols[4];
      e.augmented_from = field_or_empty(cols[5]);
      index.entries.push_back(std::move(e));
    }
  }
  for (const auto& e : index.entries) {
    const std::string coarse = (fs::path(dir) / e.coarse_path).string();
    EMTTS_CHECK(spec_header_ok(coarse), "corpus cache missing or invalid: " << coarse);
    if (e.has_full()) {
      const std::string full = (fs::path(dir) / e.full_path).string();
      EMTTS_CHECK(spec_header_ok(full), "corpus cache missing or invalid: " << full);
    }
  }
  return index;
}

CorpusIndex build_corpus(const std::string& metadata_tsv, const std::string& wav_dir,
                         const std::string& out_dir, const DspConfig& cfg, bool strict,
                         BuildReport* report) {
  cfg.validate();
  BuildReport local;
  BuildReport& rep = report ? *report : local;

  struct Row {
    std::string id, transcript, wav;
  };
  std::vector<Row> rows;
  {
    std::ifstream in(metadata_tsv);
    EMTTS_CHECK(in.good(), "cannot open metadata file: " << metadata_tsv);
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto cols = split_tsv(line);
      if (cols.size() != 2) {
        rep.row_errors.push_back("line " + std::to_string(lineno) + ": expected id<TAB>transcript");
        continue;
      }
      const std::string& id = cols[0];
      const std::string& transcript = cols[1];
      if (transcript.empty()) {
        rep.row_errors.push_back("id '" + id + "': empty transcript");
        continue;
      }
      EMTTS_CHECK(seen.insert(id).second, "duplicate utterance id: '" << id << "'");
      const std::string wav = (fs::path(wav_dir) / (id + ".wav")).string();
      if (!fs::exists(wav)) {
        rep.row_errors.push_back("id '" + id + "': missing WAV file " + wav);
        continue;
      }
      rows.push_back({id, transcript, wav});
    }
  }
  if (strict && !rep.row_errors.empty()) {
    std::string msg = "corpus build failed (--strict) with " +
                      std::to_string(rep.row_errors.size()) + " bad rows:";
    for (const auto& e : rep.row_errors) msg += "\n  " + e;
    throw Error(msg);
  }
  EMTTS_CHECK(!rows.empty(), "no usable rows in " << metadata_tsv);

  fs::create_directories(fs::path(out_dir) / "cache");

  CorpusIndex index;
  index.root = out_dir;
  {
    std::vector<std::string> texts;
    for (const auto& r : rows) texts.push_back(r.transcript);
    index.vocab = Vocabulary::from_texts(texts);
  }

  index.entries.resize(rows.size());
  std::vector<std::string> errors(rows.size());
  const int n = static_cast<int>(rows.size());
  // Feature caching is independent per file.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const Row& r = rows[static_cast<size_t>(i)];
    CorpusEntry e;
    e.id = r.id;
    e.transcript = r.transcript;
    e.coarse_path = "cache/" + r.id + ".mel.emsp";
    e.full_path = "cache/" + r.id + ".full.emsp";
    const std::string coarse_abs = (fs::path(out_dir) / e.coarse_path).string();
    const std::string full_abs = (fs::path(out_dir) / e.full_path).string();
    try {
      if (spec_header_ok(coarse_abs) && spec_header_ok(full_abs)) {
#pragma omp atomic
        rep.cached++;
      } else {
        std::vector<std::string> warn;
        Waveform w = load_wav(r.wav, &warn);
        SpectrogramPair pair = spectrogram_pair(w, cfg);
        save_spec(coarse_abs, pair.mel_coarse);
        if (cfg.ssrn_output_mel)
          save_spec(full_abs, mel_full_rate(w, cfg));
        else
          save_spec(full_abs, pair.linear_full);
#pragma omp critical(build_report)
        {
          rep.built++;
          for (auto& s : warn) rep.warnings.push_back(std::move(s));
        }
      }
    } catch (const std::exception& ex) {
      errors[static_cast<size_t>(i)] = std::string("id '") + r.id + "': " + ex.what();
    }
    index.entries[static_cast<size_t>(i)] = std::move(e);
  }
  for (const auto& err : errors)
    if (!err.empty()) rep.row_errors.push_back(err);
  if (strict && !rep.row_errors.empty()) {
    std::string msg = "corpus build failed (--strict):";
    for (const auto& e : rep.row_errors) msg += "\n  " + e;
    throw Error(msg);
  }

  // Deterministic 80/20 split by id hash: order entries by hash, first 80%
  // (rounded up) train. Independent of metadata order.
  std::vector<size_t> order(index.entries.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const uint64_t ha = fnv1a64(index.entries[a].id);
    const uint64_t hb = fnv1a64(index.entries[b].id);
    return ha != hb ? ha < hb : index.entries[a].id < index.entries[b].id;
  });
  const size_t n_train = (index.entries.size() * 8 + 9) / 10;
  for (size_t k = 0; k < order.size(); ++k)
    index.entries[order[k]].split = k < n_train ? "train" : "val";

  save_corpus_index(index);
  return index;
}

CorpusIndex expand_corpus(const CorpusIndex& input, const std::string& out_dir,
                          const AugmentPolicy& policy, uint64_t seed) {
  EMTTS_CHECK(!input.entries.empty(), "expand_corpus: empty corpus");
  CorpusIndex out;
  out.root = out_dir;
  out.vocab = input.vocab;
  fs::create_directories(fs::path(out_dir) / "cache");

  const int variants = policy.expansion_factor - 1;
  const int n = static_cast<int>(input.entries.size());
  std::vector<std::vector<CorpusEntry>> groups(static_cast<size_t>(n));
  std::vector<std::string> errors(static_cast<size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      const CorpusEntry& src = input.entries[static_cast<size_t>(i)];
      std::vector<CorpusEntry>& group = groups[static_cast<size_t>(i)];
      // Original caches are copied so the expanded corpus is self-contained.
      CorpusEntry orig = src;
      auto copy_if_needed = [&](const std::string& rel) {
        if (rel.empty()) return;
        const fs::path from = fs::path(input.root) / rel;
        const fs::path to = fs::path(out_dir) / rel;
        if (fs::exists(to)) return;
        fs::copy_file(from, to, fs::copy_options::overwrite_existing);
      };
      copy_if_needed(src.coarse_path);
      copy_if_needed(src.full_path);
      group.push_back(orig);

      if (variants > 0) {
        Tensor coarse = load_spec((fs::path(input.root) / src.coarse_path).string());
        policy.validate(coarse.extent(0));
        for (int k = 1; k <= variants; ++k) {
          const uint64_t vseed = mix_seed(mix_seed(seed, fnv1a64(src.id)), static_cast<uint64_t>(k));
          Tensor aug = augment_spectrogram(coarse, policy, vseed);
          CorpusEntry e;
          e.id = src.id + "_aug" + std::to_string(k);
          e.transcript = src.transcript;
          e.coarse_path = "cache/" + e.id + ".mel.emsp";
          e.full_path = "";  // masks/warps don't transfer across rates
          e.split = src.split;
          e.augmented_from = src.id;
          save_spec((fs::path(out_dir) / e.coarse_path).string(), aug);
          group.push_back(std::move(e));
        }
      }
    } catch (const std::exception& ex) {
      errors[static_cast<size_t>(i)] = ex.what();
    }
  }
  for (const auto& err : errors)
    EMTTS_CHECK(err.empty(), "expand_corpus failed: " << err);
  for (auto& group : groups)
    for (auto& e : group) out.entries.push_back(std::move(e));
  EMTTS_CHECK(out.entries.size() ==
                  input.entries.size() * static_cast<size_t>(policy.expansion_factor),
              "expand_corpus: output count mismatch");
  save_corpus_index(out);
  return out;
}

}  // namespace emtts
