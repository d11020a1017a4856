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

#include "emtts/trainloop.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "emtts/eval.hpp"

namespace fs = std::filesystem;

namespace emtts {

namespace {

constexpr uint64_t kBatchTag = 0xBA7C4;
constexpr uint64_t kDropTag = 0xD409;
constexpr uint64_t kFlyTag = 0xA06F17;

DropoutCtx make_dropout(const StepOptions& opts, uint64_t item) {
  DropoutCtx ctx;
  ctx.enabled = !opts.deterministic && opts.dropout_rate > 0.0;
  ctx.rate = opts.dropout_rate;
  ctx.seed = mix_seed(opts.seed, kDropTag, item);
  ctx.step = opts.step;
  return ctx;
}

std::string ckpt_name(uint64_t step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step-%06llu.emtt", static_cast<unsigned long long>(step));
  return buf;
}

}  // namespace

T2SStepResult t2s_train_step(T2SModel& model, AdamState& state, const AdamConfig& adam,
                             const std::vector<std::pair<std::vector<int>, Tensor>>& batch,
                             const StepOptions& opts) {
  EMTTS_CHECK(!batch.empty(), "t2s_train_step: empty batch");
  const real inv_b = 1.0 / static_cast<real>(batch.size());

  model.params().zero_grad();
  Tape t;
  ParamBinder bind(t);
  Var total{-1};
  T2SStepResult res;
  for (size_t i = 0; i < batch.size(); ++i) {
    const auto& [ids, target] = batch[i];
    DropoutCtx dropout = make_dropout(opts, i);
    auto fwd = model.forward(t, bind, ids, shift_right_one(target),
                             dropout.enabled ? &dropout : nullptr);
    // detach_attention cuts the gradient of the attention loss only; the
    // decoder path through R = V*A stays intact.
    Var attn = opts.detach_attention ? ops::detach(t, fwd.attention) : fwd.attention;
    Var lh = loss_hiera(t, fwd.logits, fwd.y, target);
    Var item = lh;
    if (opts.guided_attention) {
      Var la = guided_attention_loss(t, attn);
      item = ops::add(t, lh, la);
      res.loss_attn += t.scalar(la) * inv_b;
    }
    res.loss_hiera += t.scalar(lh) * inv_b;
    res.diagonality += attention_diagonality(t.val(fwd.attention)) * inv_b;
    total = total.valid() ? ops::add(t, total, item) : item;
  }
  Var loss = ops::scale(t, total, inv_b);
  EMTTS_CHECK(std::isfinite(t.scalar(loss)), "t2s_train_step: loss is not finite");
  t.backward(loss);
  adam_step(model.params(), state, adam);
  return res;
}

real ssrn_train_step(SsrnModel& model, AdamState& state, const AdamConfig& adam,
                     const std::vector<SsrnBatchItem>& batch, const StepOptions& opts) {
  EMTTS_CHECK(!batch.empty(), "ssrn_train_step: empty batch");
  const real inv_b = 1.0 / static_cast<real>(batch.size());

  model.params().zero_grad();
  Tape t;
  ParamBinder bind(t);
  Var total{-1};
  real hiera = 0.0;
  for (size_t i = 0; i < batch.size(); ++i) {
    const SsrnBatchItem& item = batch[i];
    DropoutCtx dropout = make_dropout(opts, i);
    auto fwd = model.forward(t, bind, t.constant(item.coarse),
                             dropout.enabled ? &dropout : nullptr);
    const Tensor& target = item.full;
    Var lh{-1};
    if (item.valid_cols >= target.extent(1)) {
      lh = loss_hiera(t, fwd.logits, fwd.y, target);
    } else {
      Tensor mask(target.shape());
      for (int r = 0; r < target.extent(0); ++r)
        for (int c = 0; c < item.valid_cols; ++c) mask.at(r, c) = 1.0;
      lh = loss_hiera(t, fwd.logits, fwd.y, target, &mask);
    }
    hiera += t.scalar(lh) * inv_b;
    total = total.valid() ? ops::add(t, total, lh) : lh;
  }
  Var loss = ops::scale(t, total, inv_b);
  EMTTS_CHECK(std::isfinite(t.scalar(loss)), "ssrn_train_step: loss is not finite");
  t.backward(loss);
  adam_step(model.params(), state, adam);
  return hiera;
}

SsrnBatchItem sample_ssrn_crop(const Tensor& coarse, const Tensor& full, int crop_t,
                               int reduction, UniformStream& rng) {
  EMTTS_CHECK(crop_t % reduction == 0, "crop_t must be a multiple of the reduction factor");
  EMTTS_CHECK(full.extent(1) == coarse.extent(1) * reduction,
              "full/coarse frame counts disagree: " << full.shape_str() << " vs "
              << coarse.shape_str());
  const int t_full = full.extent(1);
  const int crop_c = crop_t / reduction;
  SsrnBatchItem item;
  if (t_full >= crop_t) {
    const int max_start = (t_full - crop_t) / reduction;
    const int start = reduction * static_cast<int>(rng.next_int(0, max_start));
    item.full = Tensor({full.extent(0), crop_t});
    for (int r = 0; r < full.extent(0); ++r)
      for (int c = 0; c < crop_t; ++c) item.full.at(r, c) = full.at(r, start + c);
    item.coarse = Tensor({coarse.extent(0), crop_c});
    const int cstart = start / reduction;
    for (int r = 0; r < coarse.extent(0); ++r)
      for (int c = 0; c < crop_c; ++c) item.coarse.at(r, c) = coarse.at(r, cstart + c);
    item.valid_cols = crop_t;
  } else {
    item.full = Tensor({full.extent(0), crop_t});
    for (int r = 0; r < full.extent(0); ++r)
      for (int c = 0; c < t_full; ++c) item.full.at(r, c) = full.at(r, c);
    item.coarse = Tensor({coarse.extent(0), crop_c});
    for (int r = 0; r < coarse.extent(0); ++r)
      for (int c = 0; c < coarse.extent(1); ++c) item.coarse.at(r, c) = coarse.at(r, c);
    item.valid_cols = t_full;
  }
  return item;
}

namespace {

class SpecCacheLoader {
 public:
  explicit SpecCacheLoader(const std::string& root) : root_(root) {}
  const Tensor& get(const std::string& rel) {
    auto it = cache_.find(rel);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(rel, load_spec((fs::path(root_) / rel).string())).first->second;
  }

 private:
  std::string root_;
  std::unordered_map<std::string, Tensor> cache_;
};

void check_model_config_match(const std::map<std::string, std::string>& a,
                              const std::map<std::string, std::string>& b) {
  for (const char* key : {"embed_dim", "hidden_dim", "ssrn_channels", "n_mels", "n_fft",
                          "reduction", "ssrn_output"}) {
    auto ia = a.find(key), ib = b.find(key);
    if (ia != a.end() && ib != b.end())
      EMTTS_CHECK(ia->second == ib->second,
                  "checkpoint config mismatch on '" << key << "': " << ia->second
                  << " vs " << ib->second);
  }
}

}  // namespace

TrainResult train_loop(const RunConfig& cfg, const std::string& module,
                       const CorpusIndex& corpus, const std::string& out_dir,
                       const std::string& resume_from) {
  cfg.validate();
  EMTTS_CHECK(module == "t2s" || module == "ssrn", "unknown training module: " << module);
  const bool is_t2s = module == "t2s";

  const auto train_entries = corpus.select("train", /*require_full=*/!is_t2s);
  EMTTS_CHECK(!train_entries.empty(), "corpus has no usable training entries for " << module);

  fs::create_directories(out_dir);
  echo_config(out_dir, cfg);

  T2SModel t2s(cfg.t2s_config(), corpus.vocab.size(), cfg.seed);
  SsrnModel ssrn(cfg.ssrn_config(), cfg.seed);
  ModelParams& params = is_t2s ? t2s.params() : ssrn.params();

  AdamState state = AdamState::init(params);
  uint64_t start_step = 0;
  const auto snapshot = config_snapshot(cfg);
  if (!resume_from.empty()) {
    LoadedCheckpoint ck = load_checkpoint(resume_from);
    EMTTS_CHECK(ck.module == module, "checkpoint is for module '" << ck.module
                << "', requested '" << module << "'");
    check_model_config_match(ck.config, snapshot);
    apply_checkpoint(ck, params, &state);
    start_step = ck.step;
  }

  const AdamConfig adam{cfg.lr_for(module), cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  SpecCacheLoader specs(corpus.root);

  std::ofstream metrics(fs::path(out_dir) / "metrics.tsv", std::ios::app);
  EMTTS_CHECK(metrics.good(), "cannot open metrics file in " << out_dir);
  if (start_step == 0) {
    metrics << (is_t2s ? "# step\tloss_hiera\tloss_attn\tdiag\tms\n"
                       : "# step\tloss_hiera\tms\n");
  }

  const std::vector<uint32_t>& vocab_cps = corpus.vocab.codepoints();
  TrainResult result;
  auto write_ckpt = [&](uint64_t step) {
    const std::string path = (fs::path(out_dir) / ckpt_name(step)).string();
    save_checkpoint(path, module, step, params, state, snapshot,
                    is_t2s ? vocab_cps : std::vector<uint32_t>{});
    result.last_checkpoint = path;
  };

  for (uint64_t step = start_step + 1; step <= static_cast<uint64_t>(cfg.max_steps); ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    UniformStream rng(mix_seed(cfg.seed, kBatchTag, step));

    StepOptions opts;
    opts.guided_attention = cfg.guided_attention;
    opts.deterministic = cfg.deterministic;
    opts.dropout_rate = cfg.dropout_rate;
    opts.seed = cfg.seed;
    opts.step = step;

    real loss_value = 0.0;
    T2SStepResult t2s_res;
    try {
      if (is_t2s) {
        std::vector<std::pair<std::vector<int>, Tensor>> batch;
        for (int b = 0; b < cfg.batch_size; ++b) {
          const auto* e =
              train_entries[static_cast<size_t>(rng.next_int(0, static_cast<int64_t>(train_entries.size()) - 1))];
          Tensor mel = specs.get(e->coarse_path);
          if (cfg.augment_on_the_fly)
            mel = augment_spectrogram(mel, cfg.augment,
                                      mix_seed(mix_seed(cfg.seed, kFlyTag, step),
                                               static_cast<uint64_t>(b)));
          batch.emplace_back(corpus.vocab.tokenize(e->transcript), std::move(mel));
        }
        t2s_res = t2s_train_step(t2s, state, adam, batch, opts);
        loss_value = t2s_res.loss_hiera;
      } else {
        std::vector<SsrnBatchItem> batch;
        for (int b = 0; b < cfg.batch_size; ++b) {
          const auto* e =
              train_entries[static_cast<size_t>(rng.next_int(0, static_cast<int64_t>(train_entries.size()) - 1))];
          batch.push_back(sample_ssrn_crop(specs.get(e->coarse_path), specs.get(e->full_path),
                                           cfg.crop_t, cfg.dsp.reduction, rng));
        }
        loss_value = ssrn_train_step(ssrn, state, adam, batch, opts);
      }
    } catch (const Error& e) {
      // Non-finite loss/gradients abort the run; checkpoints on disk stay.
      throw Error(std::string(e.what()) + " (aborted at step " + std::to_string(step) +
                  ", last checkpoint: " +
                  (result.last_checkpoint.empty() ? "none" : result.last_checkpoint) + ")");
    }

    const auto t1 = std::chrono::steady_clock::now();
    const double ms =
        cfg.deterministic ? 0.0 : std::chrono::duration<double, std::milli>(t1 - t0).count();
    char line[256];
    if (is_t2s)
      std::snprintf(line, sizeof(line), "%llu\t%.17g\t%.17g\t%.17g\t%.3f\n",
                    static_cast<unsigned long long>(step), t2s_res.loss_hiera,
                    t2s_res.loss_attn, t2s_res.diagonality, ms);
    else
      std::snprintf(line, sizeof(line), "%llu\t%.17g\t%.3f\n",
                    static_cast<unsigned long long>(step), loss_value, ms);
    metrics << line;
    metrics.flush();

    result.final_step = step;
    result.last_loss = loss_value;
    if (step % static_cast<uint64_t>(cfg.checkpoint_every) == 0 ||
        step == static_cast<uint64_t>(cfg.max_steps))
      write_ckpt(step);
  }
  return result;
}

}  // namespace emtts
