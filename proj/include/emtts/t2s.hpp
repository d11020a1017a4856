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

#ifndef EMTTS_T2S_HPP_
#define EMTTS_T2S_HPP_

#include <vector>

#include "emtts/nn.hpp"
#include "emtts/vocab.hpp"

namespace emtts {

struct T2SConfig {
  int e = 128;  // embedding dim
  int d = 256;  // hidden dim
  int mel_bins = 80;
  real dropout_rate = 0.05;
  real init_stddev = 0.02;

  void validate() const {
    EMTTS_CHECK(e > 0 && d > 0 && mel_bins > 0, "t2s dims must be positive");
    EMTTS_CHECK(d % 2 == 0, "t2s hidden dim must be even");
  }
};

// Layer schedules. TextEncoder runs at 2d channels and splits into K/V;
// AudioEncoder and AudioDecoder are causal so decoded frames can be fed
// back one at a time at synthesis.
std::vector<LayerDesc> text_encoder_stack(const T2SConfig& cfg);
std::vector<LayerDesc> audio_encoder_stack(const T2SConfig& cfg);
std::vector<LayerDesc> audio_decoder_stack(const T2SConfig& cfg);

class T2SModel {
 public:
  T2SModel(T2SConfig cfg, int vocab_size, uint64_t init_seed);

  const T2SConfig& config() const { return cfg_; }
  int vocab_size() const { return vocab_size_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  struct Encoded {
    Var k, v;  // each d x N
  };
  Encoded text_encode(Tape& t, ParamBinder& bind, const std::vector<int>& ids,
                      DropoutCtx* dropout = nullptr);

  // s_in: mel_bins x T'; in training the target shifted right by one frame,
  // in synthesis the running prefix of generated frames.
  Var audio_encode(Tape& t, ParamBinder& bind, Var s_in, DropoutCtx* dropout = nullptr);

  struct AttentionOut {
    Var a;   // N x T'
    Var r;   // d x T'
    Var rp;  // 2d x T', [R; Q]
  };
  // A = softmax_columns(K^T Q / sqrt(d)), R = V A, R' = [R; Q].
  static AttentionOut attend(Tape& t, Var k, Var v, Var q);

  struct Decoded {
    Var logits;  // mel_bins x T'
    Var y;       // sigmoid(logits)
  };
  Decoded audio_decode(Tape& t, ParamBinder& bind, Var rp, DropoutCtx* dropout = nullptr);

  struct ForwardOut {
    Var logits, y, attention;
  };
  ForwardOut forward(Tape& t, ParamBinder& bind, const std::vector<int>& ids,
                     const Tensor& s_in, DropoutCtx* dropout = nullptr);

 private:
  T2SConfig cfg_;
  int vocab_size_;
  ModelParams params_;
};

// Binary divergence term of the spectrogram loss, mean over entries
// (optionally restricted by a 0/1 mask).
Var loss_spec(Tape& t, Var logits, const Tensor& target, const Tensor* mask = nullptr);
// loss_spec plus the L1 term mean|Y - S|.
Var loss_hiera(Tape& t, Var logits, Var y, const Tensor& target, const Tensor* mask = nullptr);

// W[n][t] = 1 - exp(-(n/N - t/T)^2 / (2 g^2)), 0-based indices.
Tensor guided_attention_weights(int n_rows, int t_cols, real g = 0.2);
// mean over (n,t) of A .* W.
Var guided_attention_loss(Tape& t, Var attention, real g = 0.2);

// Teacher-forcing input: column 0 zeros, column t = s[:, t-1].
Tensor shift_right_one(const Tensor& s);

}  // namespace emtts

#endif  // EMTTS_T2S_HPP_
