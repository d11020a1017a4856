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

#include "emtts/t2s.hpp"

#include <cmath>

namespace emtts {

std::vector<LayerDesc> text_encoder_stack(const T2SConfig& cfg) {
  const int d2 = 2 * cfg.d;
  std::vector<LayerDesc> s;
  s.push_back(conv_layer("conv1", cfg.e, d2, 1, 1, false, Act::kRelu));
  s.push_back(conv_layer("conv2", d2, d2, 1, 1, false, Act::kNone));
  int idx = 1;
  for (int rep = 0; rep < 2; ++rep)
    for (int dil : {1, 3, 9, 27})
      s.push_back(highway_layer("hw" + std::to_string(idx++), d2, 3, dil, false));
  for (int rep = 0; rep < 2; ++rep)
    s.push_back(highway_layer("hw" + std::to_string(idx++), d2, 3, 1, false));
  for (int rep = 0; rep < 2; ++rep)
    s.push_back(highway_layer("hw" + std::to_string(idx++), d2, 1, 1, false));
  s.back().dropout = false;
  return s;
}

std::vector<LayerDesc> audio_encoder_stack(const T2SConfig& cfg) {
  std::vector<LayerDesc> s;
  s.push_back(conv_layer("conv1", cfg.mel_bins, cfg.d, 1, 1, true, Act::kRelu));
  s.push_back(conv_layer("conv2", cfg.d, cfg.d, 1, 1, true, Act::kRelu));
  s.push_back(conv_layer("conv3", cfg.d, cfg.d, 1, 1, true, Act::kNone));
  int idx = 1;
  for (int rep = 0; rep < 2; ++rep)
    for (int dil : {1, 3, 9, 27})
      s.push_back(highway_layer("hw" + std::to_string(idx++), cfg.d, 3, dil, true));
  for (int rep = 0; rep < 2; ++rep)
    s.push_back(highway_layer("hw" + std::to_string(idx++), cfg.d, 3, 3, true));
  s.back().dropout = false;
  return s;
}

std::vector<LayerDesc> audio_decoder_stack(const T2SConfig& cfg) {
  std::vector<LayerDesc> s;
  s.push_back(conv_layer("conv1", 2 * cfg.d, cfg.d, 1, 1, true, Act::kNone));
  int idx = 1;
  for (int dil : {1, 3, 9, 27})
    s.push_back(highway_layer("hw" + std::to_string(idx++), cfg.d, 3, dil, true));
  for (int rep = 0; rep < 2; ++rep)
    s.push_back(highway_layer("hw" + std::to_string(idx++), cfg.d, 3, 1, true));
  s.push_back(conv_layer("conv2", cfg.d, cfg.d, 1, 1, true, Act::kRelu));
  s.push_back(conv_layer("conv3", cfg.d, cfg.d, 1, 1, true, Act::kRelu));
  s.push_back(conv_layer("conv4", cfg.d, cfg.d, 1, 1, true, Act::kRelu));
  s.push_back(conv_layer("logits", cfg.d, cfg.mel_bins, 1, 1, true, Act::kNone, false));
  return s;
}

T2SModel::T2SModel(T2SConfig cfg, int vocab_size, uint64_t init_seed)
    : cfg_(cfg), vocab_size_(vocab_size) {
  cfg_.validate();
  EMTTS_CHECK(vocab_size_ >= 2, "vocabulary must contain at least PAD and EOS");
  const std::string en = "t2s.textenc.embed";
  params_.create(en, Tensor::gaussian({vocab_size_, cfg_.e}, cfg_.init_stddev,
                                      mix_seed(init_seed, fnv1a64(en))));
  create_stack_params(params_, "t2s.textenc", text_encoder_stack(cfg_), cfg_.init_stddev,
                      init_seed);
  create_stack_params(params_, "t2s.audioenc", audio_encoder_stack(cfg_), cfg_.init_stddev,
                      init_seed);
  create_stack_params(params_, "t2s.audiodec", audio_decoder_stack(cfg_), cfg_.init_stddev,
                      init_seed);
}

T2SModel::Encoded T2SModel::text_encode(Tape& t, ParamBinder& bind,
                                        const std::vector<int>& ids, DropoutCtx* dropout) {
  for (int id : ids)
    EMTTS_CHECK(0 <= id && id < vocab_size_,
                "token id " << id << " outside vocabulary of size " << vocab_size_);
  Var emb = ops::embedding(t, bind(params_.get("t2s.textenc.embed")), ids);
  Var enc = run_stack(t, bind, params_, "t2s.textenc", text_encoder_stack(cfg_), emb, dropout);
  Encoded out;
  out.k = ops::slice_rows(t, enc, 0, cfg_.d);
  out.v = ops::slice_rows(t, enc, cfg_.d, 2 * cfg_.d);
  return out;
}

Var T2SModel::audio_encode(Tape& t, ParamBinder& bind, Var s_in, DropoutCtx* dropout) {
  EMTTS_CHECK(t.val(s_in).rank() == 2 && t.val(s_in).extent(0) == cfg_.mel_bins,
              "audio_encode: expected " << cfg_.mel_bins << " x T input, got "
              << t.val(s_in).shape_str());
  return run_stack(t, bind, params_, "t2s.audioenc", audio_encoder_stack(cfg_), s_in, dropout);
}

T2SModel::AttentionOut T2SModel::attend(Tape& t, Var k, Var v, Var q) {
  const int d = t.val(k).extent(0);
  EMTTS_CHECK(t.val(q).extent(0) == d && t.val(v).extent(0) == d,
              "attend: K/V/Q must share the hidden dimension");
  Var scores =
      ops::scale(t, ops::matmul(t, k, q, true, false), 1.0 / std::sqrt(static_cast<real>(d)));
  AttentionOut out;
  out.a = ops::softmax_columns(t, scores);
  out.r = ops::matmul(t, v, out.a);
  out.rp = ops::concat_rows(t, out.r, q);
  return out;
}

T2SModel::Decoded T2SModel::audio_decode(Tape& t, ParamBinder& bind, Var rp,
                                         DropoutCtx* dropout) {
  EMTTS_CHECK(t.val(rp).extent(0) == 2 * cfg_.d,
              "audio_decode: expected " << 2 * cfg_.d << " rows, got "
              << t.val(rp).shape_str());
  Decoded out;
  out.logits =
      run_stack(t, bind, params_, "t2s.audiodec", audio_decoder_stack(cfg_), rp, dropout);
  out.y = ops::sigmoid(t, out.logits);
  return out;
}

T2SModel::ForwardOut T2SModel::forward(Tape& t, ParamBinder& bind,
                                       const std::vector<int>& ids, const Tensor& s_in,
                                       DropoutCtx* dropout) {
  Encoded enc = text_encode(t, bind, ids, dropout);
  Var q = audio_encode(t, bind, t.constant(s_in), dropout);
  AttentionOut att = attend(t, enc.k, enc.v, q);
  Decoded dec = audio_decode(t, bind, att.rp, dropout);
  return ForwardOut{dec.logits, dec.y, att.a};
}

namespace {

real mask_count(const Tensor& shape_like, const Tensor* mask) {
  if (!mask) return static_cast<real>(shape_like.size());
  real c = 0.0;
  for (real v : mask->vec()) c += v;
  EMTTS_CHECK(c > 0, "loss mask selects no entries");
  return c;
}

}  // namespace

Var loss_spec(Tape& t, Var logits, const Tensor& target, const Tensor* mask) {
  return ops::binary_divergence_mean(t, logits, target, mask,
                                     mask_count(t.val(logits), mask));
}

Var loss_hiera(Tape& t, Var logits, Var y, const Tensor& target, const Tensor* mask) {
  Var spec = loss_spec(t, logits, target, mask);
  Var l1 = ops::l1_mean(t, y, target, mask, mask_count(t.val(y), mask));
  return ops::add(t, spec, l1);
}

Tensor guided_attention_weights(int n_rows, int t_cols, real g) {
  EMTTS_CHECK(n_rows >= 1 && t_cols >= 1 && g > 0, "bad guided attention arguments");
  Tensor w({n_rows, t_cols});
  for (int n = 0; n < n_rows; ++n)
    for (int t = 0; t < t_cols; ++t) {
      const real d = static_cast<real>(n) / n_rows - static_cast<real>(t) / t_cols;
      w.at(n, t) = 1.0 - std::exp(-(d * d) / (2.0 * g * g));
    }
  return w;
}

Var guided_attention_loss(Tape& t, Var attention, real g) {
  const Tensor& a = t.val(attention);
  EMTTS_CHECK(a.rank() == 2, "guided_attention_loss: rank-2 attention required");
  Tensor w = guided_attention_weights(a.extent(0), a.extent(1), g);
  return ops::mean_all(t, ops::mul(t, attention, t.constant(std::move(w))));
}

Tensor shift_right_one(const Tensor& s) {
  EMTTS_CHECK(s.rank() == 2, "shift_right_one: rank-2 input required");
  Tensor out(s.shape());
  for (int r = 0; r < s.extent(0); ++r)
    for (int c = 1; c < s.extent(1); ++c) out.at(r, c) = s.at(r, c - 1);
  return out;
}

}  // namespace emtts
