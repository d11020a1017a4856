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

#ifndef EMTTS_EVAL_HPP_
#define EMTTS_EVAL_HPP_

#include <optional>
#include <vector>

#include "emtts/dsp.hpp"

namespace emtts {

// Mel-cepstral distortion in dB. Convention: 13 coefficients c1..c13 (c0
// excluded) from the 80-bin natural-log mel magnitude via orthogonal-ish
// DCT-II, frames DTW-aligned with Euclidean local cost,
//   MCD = (10/ln 10) * sqrt(2) * mean ||c - c'||_2.
real mcd(const Waveform& ref, const Waveform& syn);

// Per-frame mel cepstra (frames x 13); exposed for the eval tests.
std::vector<std::vector<real>> mel_cepstra(const Waveform& w);

// Fundamental frequency track: 5 ms hop, 25 ms window, normalized
// autocorrelation peak in [70, 400] Hz with a 0.3 voicing threshold;
// 0 marks unvoiced frames.
struct F0Track {
  std::vector<real> f0;
};
F0Track extract_f0(const Waveform& w);

struct PccResult {
  bool defined = false;  // false: < 10 aligned voiced frames or zero variance
  real value = 0.0;
  int frames_aligned = 0;
};

// Pearson correlation of DTW-aligned log-F0 over frames voiced in both
// signals. Alignment runs on mean-centered log-F0 so a constant pitch
// offset cannot distort the path; the correlation itself is shift
// invariant either way.
PccResult f0_pcc(const Waveform& ref, const Waveform& syn);

// (1/T) sum_t exp(-(argmax_t/N - t/T)^2 / (2 g^2)); ties take the lowest
// row. 1.0 for a perfectly diagonal square one-hot attention.
real attention_diagonality(const Tensor& attention, real g = 0.2);

// Symmetric-step DTW over a local cost matrix; returns the aligned index
// pairs along the optimal path (ties prefer the diagonal).
std::vector<std::pair<int, int>> dtw_align(const std::vector<std::vector<real>>& cost);

}  // namespace emtts

#endif  // EMTTS_EVAL_HPP_
