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

#ifndef EMTTS_SYNTH_HPP_
#define EMTTS_SYNTH_HPP_

#include <string>
#include <vector>

#include "emtts/dsp.hpp"
#include "emtts/ssrn.hpp"
#include "emtts/t2s.hpp"

namespace emtts {

struct SynthOptions {
  int max_frames = 200;        // coarse-frame budget
  bool forced_attention = true;
  int force_back = 1;
  int force_forward = 3;
  int stop_dwell = 10;         // frames the argmax must rest on the last token
  bool incremental = false;    // per-frame cached decode instead of prefix re-runs

  void validate() const {
    EMTTS_CHECK(max_frames >= 1, "max_frames must be >= 1");
    EMTTS_CHECK(force_back >= 0 && force_forward >= 1, "bad forcing window");
    EMTTS_CHECK(stop_dwell >= 1, "stop_dwell must be >= 1");
  }
};

// Masks score entries outside [prev_pos - back, prev_pos + forward] to a
// large negative value, so the post-softmax argmax stays in the window.
std::vector<real> forced_attention_column(std::vector<real> scores, int prev_pos,
                                          int back = 1, int forward = 3);

struct DecodeResult {
  Tensor coarse;     // mel_bins x T_generated, predicted frames
  Tensor attention;  // N x T_generated
  bool truncated = false;
  std::vector<int> argmax_trajectory;
};

// Autoregressive coarse-mel generation: start from a zero frame, feed the
// prefix through the causal stacks, append the predicted frame, stop when
// the attention argmax dwells on the last token or the budget runs out.
DecodeResult decode_coarse(T2SModel& model, const std::vector<int>& ids,
                           const SynthOptions& opts);

struct SynthArtifacts {
  Tensor coarse;
  Tensor full;
  Tensor attention;
  bool truncated = false;
};

// tokenize -> decode_coarse -> ssrn -> griffin_lim. The waveform length is
// exactly 4 * T' * hop samples. When the SSRN emits mel bins, the linear
// spectrogram is approximated with a transposed-filterbank projection
// before Griffin-Lim.
Waveform synth_utterance(T2SModel& t2s, SsrnModel& ssrn, const Vocabulary& vocab,
                         const std::string& text, const DspConfig& dsp,
                         const SynthOptions& opts, SynthArtifacts* artifacts = nullptr);

// SSRN forward on plain tensors (no gradients).
Tensor ssrn_infer(SsrnModel& ssrn, const Tensor& coarse);

}  // namespace emtts

#endif  // EMTTS_SYNTH_HPP_
