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

#include "emtts/synth.hpp"

#include <algorithm>
#include <cmath>

#include "emtts/kernels.hpp"

namespace emtts {

namespace {

constexpr real kMaskedScore = -1e30;

real stable_sigmoid(real z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const real e = std::exp(z);
  return e / (1.0 + e);
}

int column_argmax(const std::vector<real>& col) {
  int arg = 0;
  for (size_t i = 1; i < col.size(); ++i)
    if (col[i] > col[arg]) arg = static_cast<int>(i);
  return arg;
}

void softmax_inplace(std::vector<real>& col) {
  real mx = col[0];
  for (real v : col) mx = std::max(mx, v);
  real z = 0.0;
  for (auto& v : col) {
    v = std::exp(v - mx);
    z += v;
  }
  for (auto& v : col) v /= z;
}

// Shared per-step decode state: text encoding is computed once; each new
// frame adds one attention column and one decoder frame.
struct DecodeCore {
  Tensor k, v;  // d x N
  int n = 0, d = 0, mel_bins = 0;
  const SynthOptions* opts;

  // One attention step: q column -> (pre-softmax scores col, forced mask).
  std::vector<real> scores_for(const std::vector<real>& q) const {
    std::vector<real> col(static_cast<size_t>(n), 0.0);
    const real inv = 1.0 / std::sqrt(static_cast<real>(d));
    for (int i = 0; i < n; ++i) {
      real acc = 0.0;
      for (int j = 0; j < d; ++j) acc += k.at(j, i) * q[static_cast<size_t>(j)];
      col[static_cast<size_t>(i)] = acc * inv;
    }
    return col;
  }
};

}  // namespace

std::vector<real> forced_attention_column(std::vector<real> scores, int prev_pos, int back,
                                          int forward) {
  const int n = static_cast<int>(scores.size());
  EMTTS_CHECK(n > 0 && prev_pos >= 0 && prev_pos < n,
              "forced_attention_column: prev_pos " << prev_pos << " out of range");
  for (int i = 0; i < n; ++i)
    if (i < prev_pos - back || i > prev_pos + forward) scores[i] = kMaskedScore;
  return scores;
}

DecodeResult decode_coarse(T2SModel& model, const std::vector<int>& ids,
                           const SynthOptions& opts) {
  opts.validate();
  EMTTS_CHECK(!ids.empty(), "decode_coarse: empty token sequence");
  const T2SConfig& cfg = model.config();
  const int n = static_cast<int>(ids.size());
  const int f = cfg.mel_bins;

  DecodeCore core;
  {
    Tape t;
    ParamBinder bind(t);
    auto enc = model.text_encode(t, bind, ids);
    core.k = t.val(enc.k);
    core.v = t.val(enc.v);
  }
  core.n = n;
  core.d = cfg.d;
  core.mel_bins = f;
  core.opts = &opts;

  std::vector<std::vector<real>> frames;   // generated coarse frames
  std::vector<std::vector<real>> att_cols; // post-softmax attention columns
  std::vector<int> trajectory;
  int prev_pos = 0;
  int dwell = 0;
  bool truncated = true;

  IncrementalStackRunner enc_runner(model.params(), "t2s.audioenc",
                                    audio_encoder_stack(cfg));
  IncrementalStackRunner dec_runner(model.params(), "t2s.audiodec",
                                    audio_decoder_stack(cfg));

  for (int step = 0; step < opts.max_frames; ++step) {
    std::vector<real> q_col, logits_col;
    if (opts.incremental) {
      // Feed only the newest input frame through cached causal stacks.
      std::vector<real> in_frame =
          step == 0 ? std::vector<real>(static_cast<size_t>(f), 0.0) : frames.back();
      q_col = enc_runner.step(in_frame);
      std::vector<real> scores = core.scores_for(q_col);
      if (opts.forced_attention)
        scores = forced_attention_column(scores, prev_pos, opts.force_back, opts.force_forward);
      softmax_inplace(scores);
      att_cols.push_back(scores);
      std::vector<real> rp(static_cast<size_t>(2 * cfg.d));
      for (int i = 0; i < cfg.d; ++i) {
        real acc = 0.0;
        for (int j = 0; j < n; ++j) acc += core.v.at(i, j) * scores[static_cast<size_t>(j)];
        rp[static_cast<size_t>(i)] = acc;
      }
      for (int i = 0; i < cfg.d; ++i) rp[static_cast<size_t>(cfg.d + i)] = q_col[static_cast<size_t>(i)];
      logits_col = dec_runner.step(rp);
    } else {
      // Re-run the full prefix; causality makes this equivalent.
      Tensor prefix({f, step + 1});
      for (int t = 1; t <= step; ++t)
        for (int r = 0; r < f; ++r) prefix.at(r, t) = frames[static_cast<size_t>(t - 1)][static_cast<size_t>(r)];
      Tape t;
      ParamBinder bind(t);
      Var q = model.audio_encode(t, bind, t.constant(prefix));
      Var scores = ops::scale(t, ops::matmul(t, t.constant(core.k), q, true, false),
                              1.0 / std::sqrt(static_cast<real>(cfg.d)));
      if (opts.forced_attention) {
        // Re-apply the recorded per-column windows so the prefix re-run
        // reproduces earlier steps exactly, then force the new column.
        Tensor mask({n, step + 1});
        for (int col = 0; col <= step; ++col) {
          const int pp = col == 0 ? 0 : trajectory[static_cast<size_t>(col - 1)];
          for (int i = 0; i < n; ++i)
            if (i < pp - opts.force_back || i > pp + opts.force_forward)
              mask.at(i, col) = kMaskedScore;
        }
        scores = ops::add(t, scores, t.constant(std::move(mask)));
      }
      Var a = ops::softmax_columns(t, scores);
      Var r = ops::matmul(t, t.constant(core.v), a);
      Var rp = ops::concat_rows(t, r, q);
      auto dec = model.audio_decode(t, bind, rp);
      const Tensor& av = t.val(a);
      std::vector<real> acol(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) acol[static_cast<size_t>(i)] = av.at(i, step);
      att_cols.push_back(std::move(acol));
      const Tensor& lv = t.val(dec.logits);
      logits_col.resize(static_cast<size_t>(f));
      for (int r2 = 0; r2 < f; ++r2) logits_col[static_cast<size_t>(r2)] = lv.at(r2, step);
    }

    std::vector<real> frame(static_cast<size_t>(f));
    for (int r = 0; r < f; ++r) frame[static_cast<size_t>(r)] = stable_sigmoid(logits_col[static_cast<size_t>(r)]);
    frames.push_back(std::move(frame));

    const int arg = column_argmax(att_cols.back());
    trajectory.push_back(arg);
    prev_pos = arg;
    dwell = (arg == n - 1) ? dwell + 1 : 0;
    if (dwell >= opts.stop_dwell) {
      truncated = false;
      break;
    }
  }

  const int t_gen = static_cast<int>(frames.size());
  DecodeResult out;
  out.coarse = Tensor({f, t_gen});
  out.attention = Tensor({n, t_gen});
  for (int t = 0; t < t_gen; ++t) {
    for (int r = 0; r < f; ++r) out.coarse.at(r, t) = frames[static_cast<size_t>(t)][static_cast<size_t>(r)];
    for (int i = 0; i < n; ++i) out.attention.at(i, t) = att_cols[static_cast<size_t>(t)][static_cast<size_t>(i)];
  }
  out.truncated = truncated;
  out.argmax_trajectory = std::move(trajectory);
  return out;
}

Tensor ssrn_infer(SsrnModel& ssrn, const Tensor& coarse) {
  Tape t;
  ParamBinder bind(t);
  auto out = ssrn.forward(t, bind, t.constant(coarse));
  return t.val(out.y);
}

namespace {

// Crude mel -> linear magnitude expansion through the transposed
// filterbank, for the mel-output SSRN mode.
Tensor mel_to_linear_norm(const Tensor& mel_norm, const DspConfig& cfg) {
  Tensor fb = mel_filterbank(cfg.n_mels, cfg.n_fft, kSampleRate);
  Tensor mag_mel = denormalize_db(mel_norm, cfg);
  Tensor lin = kernels::matmul(fb, mag_mel, true, false);  // bins x T
  for (int b = 0; b < lin.extent(0); ++b) {
    real wsum = 0.0;
    for (int m = 0; m < cfg.n_mels; ++m) wsum += fb.at(m, b);
    const real inv = wsum > 1e-8 ? 1.0 / wsum : 0.0;
    for (int t = 0; t < lin.extent(1); ++t) lin.at(b, t) *= inv;
  }
  return normalize_db(lin, cfg);
}

}  // namespace

Waveform synth_utterance(T2SModel& t2s, SsrnModel& ssrn, const Vocabulary& vocab,
                         const std::string& text, const DspConfig& dsp,
                         const SynthOptions& opts, SynthArtifacts* artifacts) {
  const std::vector<int> ids = vocab.tokenize(text);
  DecodeResult dec = decode_coarse(t2s, ids, opts);
  Tensor full = ssrn_infer(ssrn, dec.coarse);
  Tensor linear = dsp.ssrn_output_mel ? mel_to_linear_norm(full, dsp) : full;
  Waveform w = griffin_lim(linear, dsp);
  if (artifacts) {
    artifacts->coarse = dec.coarse;
    artifacts->full = std::move(full);
    artifacts->attention = dec.attention;
    artifacts->truncated = dec.truncated;
  }
  return w;
}

}  // namespace emtts
