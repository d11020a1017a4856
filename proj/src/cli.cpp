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

#include "emtts/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "emtts/checkpoint.hpp"
#include "emtts/config.hpp"
#include "emtts/corpus.hpp"
#include "emtts/eval.hpp"
#include "emtts/gradcheck.hpp"
#include "emtts/synth.hpp"
#include "emtts/trainloop.hpp"

namespace fs = std::filesystem;

namespace emtts {

namespace {

void apply_thread_cap() {
  if (const char* env = std::getenv("EMTTS_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
  }
}

// Shared --config/--seed plumbing plus one override option per config key.
struct ConfigArgs {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "config file (key = value lines)");
    for (const std::string& key : config_keys()) {
      cmd->add_option_function<std::string>(
          "--" + key,
          [this, key](const std::string& v) { overrides[key] = v; },
          "override config key " + key);
    }
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) apply_config_entries(cfg, read_config_file(config_path));
    apply_config_entries(cfg, overrides);
    cfg.validate();
    return cfg;
  }
};

struct LoadedModelPair {
  RunConfig cfg;
  Vocabulary vocab;
  std::unique_ptr<T2SModel> t2s;
  std::unique_ptr<SsrnModel> ssrn;
};

LoadedModelPair load_models(const std::string& t2s_path, const std::string& ssrn_path,
                            const ConfigArgs& args) {
  LoadedCheckpoint ck_t2s = load_checkpoint(t2s_path);
  LoadedCheckpoint ck_ssrn = load_checkpoint(ssrn_path);
  EMTTS_CHECK(ck_t2s.module == "t2s", t2s_path << " is a '" << ck_t2s.module
              << "' checkpoint, expected t2s");
  EMTTS_CHECK(ck_ssrn.module == "ssrn", ssrn_path << " is a '" << ck_ssrn.module
              << "' checkpoint, expected ssrn");
  for (const char* key : {"embed_dim", "hidden_dim", "ssrn_channels", "n_mels", "n_fft",
                          "hop", "reduction", "ssrn_output"}) {
    auto a = ck_t2s.config.find(key);
    auto b = ck_ssrn.config.find(key);
    EMTTS_CHECK(a != ck_t2s.config.end() && b != ck_ssrn.config.end() && a->second == b->second,
                "checkpoints disagree on config key '" << key << "'");
  }

  LoadedModelPair out;
  out.cfg = config_from_snapshot(ck_t2s.config);
  // synth-time options may be overridden from the command line
  if (!args.config_path.empty())
    apply_config_entries(out.cfg, read_config_file(args.config_path));
  apply_config_entries(out.cfg, args.overrides);
  out.cfg.validate();
  out.vocab = Vocabulary::from_codepoints(ck_t2s.vocab);
  out.t2s = std::make_unique<T2SModel>(out.cfg.t2s_config(), out.vocab.size(), 0);
  out.ssrn = std::make_unique<SsrnModel>(out.cfg.ssrn_config(), 0);
  apply_checkpoint(ck_t2s, out.t2s->params(), nullptr);
  apply_checkpoint(ck_ssrn, out.ssrn->params(), nullptr);
  return out;
}

int run_eval(const std::string& ref_path, const std::string& syn_path,
             const std::string& out_path) {
  std::vector<std::pair<std::string, std::pair<std::string, std::string>>> pairs;
  if (fs::is_directory(ref_path)) {
    EMTTS_CHECK(fs::is_directory(syn_path),
                "eval: --ref is a directory, so --syn must be one too");
    for (const auto& entry : fs::directory_iterator(syn_path)) {
      if (entry.path().extension() != ".wav") continue;
      const fs::path ref_file = fs::path(ref_path) / entry.path().filename();
      EMTTS_CHECK(fs::exists(ref_file), "eval: no reference for " << entry.path().filename());
      pairs.emplace_back(entry.path().stem().string(),
                         std::make_pair(ref_file.string(), entry.path().string()));
    }
    std::sort(pairs.begin(), pairs.end());
    EMTTS_CHECK(!pairs.empty(), "eval: no .wav files in " << syn_path);
  } else {
    pairs.emplace_back(fs::path(syn_path).stem().string(),
                       std::make_pair(ref_path, syn_path));
  }

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    EMTTS_CHECK(file.good(), "cannot write metrics to " << out_path);
    os = &file;
  }
  *os << "# pair_id\tmcd_db\tf0_pcc\tframes_aligned\n";
  for (const auto& [pair_id, paths] : pairs) {
    Waveform ref = load_wav(paths.first);
    Waveform syn = load_wav(paths.second);
    const real m = mcd(ref, syn);
    const PccResult pcc = f0_pcc(ref, syn);
    char line[160];
    if (pcc.defined)
      std::snprintf(line, sizeof(line), "%s\t%.4f\t%.6f\t%d\n", pair_id.c_str(), m,
                    pcc.value, pcc.frames_aligned);
    else
      std::snprintf(line, sizeof(line), "%s\t%.4f\tNA\t%d\n", pair_id.c_str(), m,
                    pcc.frames_aligned);
    *os << line;
  }
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  apply_thread_cap();

  CLI::App app{"emtts: two-stage convolutional text-to-speech at desk scale"};
  app.require_subcommand(1);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "build feature caches and a corpus index");
  std::string meta, wav_dir, out_dir;
  bool strict = false;
  ConfigArgs prep_args;
  prepare->add_option("--meta", meta, "metadata TSV (id<TAB>transcript)")->required();
  prepare->add_option("--wav-dir", wav_dir, "directory with <id>.wav files")->required();
  prepare->add_option("--out", out_dir, "output corpus directory")->required();
  prepare->add_flag("--strict", strict, "fail when any row is unusable");
  prep_args.attach(prepare);

  // augment
  auto* augment = app.add_subcommand("augment", "expand a corpus with augmented variants");
  std::string aug_corpus, aug_out;
  ConfigArgs aug_args;
  augment->add_option("--corpus", aug_corpus, "prepared corpus directory")->required();
  augment->add_option("--out", aug_out, "output corpus directory")->required();
  aug_args.attach(augment);

  // train
  auto* train = app.add_subcommand("train", "run a training loop");
  std::string module, train_corpus, train_out, resume;
  ConfigArgs train_args;
  train->add_option("--module", module, "t2s or ssrn")->required()
      ->check(CLI::IsMember({"t2s", "ssrn"}));
  train->add_option("--corpus", train_corpus, "prepared corpus directory")->required();
  train->add_option("--out", train_out, "run directory for checkpoints/metrics")->required();
  train->add_option("--resume", resume, "checkpoint to continue from");
  train_args.attach(train);

  // synth
  auto* synth = app.add_subcommand("synth", "synthesize a waveform from text");
  std::string text, t2s_ckpt, ssrn_ckpt, synth_out, stem = "utt";
  bool save_artifacts = false;
  ConfigArgs synth_args;
  synth->add_option("--text", text, "input text")->required();
  synth->add_option("--t2s", t2s_ckpt, "Text2Spectrum checkpoint")->required();
  synth->add_option("--ssrn", ssrn_ckpt, "SSRN checkpoint")->required();
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--name", stem, "output file stem (default: utt)");
  synth->add_flag("--save-artifacts", save_artifacts,
                  "also write coarse/full spectrograms and the attention image");
  synth_args.attach(synth);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "objective metrics (MCD, log-F0 PCC)");
  std::string ref_path, syn_path, eval_out;
  eval_cmd->add_option("--ref", ref_path, "reference wav file or directory")->required();
  eval_cmd->add_option("--syn", syn_path, "synthesized wav file or directory")->required();
  eval_cmd->add_option("--out", eval_out, "write the TSV here instead of stdout");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient audit");

  // info
  auto* info = app.add_subcommand("info", "inspect a checkpoint");
  std::string info_ckpt;
  info->add_option("--checkpoint", info_ckpt, "checkpoint path")->required();

  try {
    app.parse(argc, const_cast<char**>(argv));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (prepare->parsed()) {
      RunConfig cfg = prep_args.resolve();
      BuildReport report;
      CorpusIndex index = build_corpus(meta, wav_dir, out_dir, cfg.dsp, strict, &report);
      echo_config(out_dir, cfg);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
      for (const auto& e : report.row_errors) std::cerr << "warning: skipped row: " << e << "\n";
      int train_n = 0, val_n = 0;
      for (const auto& e : index.entries) (e.split == "train" ? train_n : val_n)++;
      std::printf("prepared %zu utterances (%d built, %d cached): %d train / %d val, vocab %d\n",
                  index.entries.size(), report.built, report.cached, train_n, val_n,
                  index.vocab.size());
    } else if (augment->parsed()) {
      RunConfig cfg = aug_args.resolve();
      CorpusIndex input = load_corpus(aug_corpus);
      CorpusIndex out = expand_corpus(input, aug_out, cfg.augment, cfg.seed);
      echo_config(aug_out, cfg);
      std::printf("expanded %zu -> %zu entries (factor %d)\n", input.entries.size(),
                  out.entries.size(), cfg.augment.expansion_factor);
    } else if (train->parsed()) {
      RunConfig cfg = train_args.resolve();
      CorpusIndex corpus = load_corpus(train_corpus);
      TrainResult res = train_loop(cfg, module, corpus, train_out, resume);
      std::printf("trained %s to step %llu, final loss %.6f, checkpoint %s\n", module.c_str(),
                  static_cast<unsigned long long>(res.final_step), res.last_loss,
                  res.last_checkpoint.c_str());
    } else if (synth->parsed()) {
      LoadedModelPair models = load_models(t2s_ckpt, ssrn_ckpt, synth_args);
      fs::create_directories(synth_out);
      echo_config(synth_out, models.cfg);
      SynthArtifacts artifacts;
      Waveform w = synth_utterance(*models.t2s, *models.ssrn, models.vocab, text,
                                   models.cfg.dsp, models.cfg.synth, &artifacts);
      const fs::path base = fs::path(synth_out) / stem;
      save_wav(base.string() + ".wav", w);
      if (save_artifacts) {
        save_spec(base.string() + ".mel.emsp", artifacts.coarse);
        save_spec(base.string() + ".full.emsp", artifacts.full);
        write_pgm(base.string() + ".attn.pgm", artifacts.attention);
      }
      std::printf("synthesized %.2f s%s -> %s.wav\n",
                  static_cast<double>(w.samples.size()) / kSampleRate,
                  artifacts.truncated ? " (truncated at max_frames)" : "",
                  base.string().c_str());
    } else if (eval_cmd->parsed()) {
      return run_eval(ref_path, syn_path, eval_out);
    } else if (gradcheck->parsed()) {
      bool ok = true;
      for (const auto& entry : gradcheck_suite()) {
        std::printf("%-28s max_rel_err %.3e\n", entry.block.c_str(), entry.max_rel_err);
        ok = ok && entry.max_rel_err < 1e-4;
      }
      if (!ok) {
        std::cerr << "error: gradient check failed (threshold 1e-4)\n";
        return 1;
      }
    } else if (info->parsed()) {
      LoadedCheckpoint ck = load_checkpoint(info_ckpt);
      int64_t count = 0;
      for (const auto& [name, tensor] : ck.params) count += tensor.size();
      std::printf("module: %s\nstep: %llu\nparameters: %lld\nvocab: %zu symbols\n",
                  ck.module.c_str(), static_cast<unsigned long long>(ck.step),
                  static_cast<long long>(count), ck.vocab.size() + 2);
      for (const auto& [k, v] : ck.config) std::printf("config %s = %s\n", k.c_str(), v.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace emtts
