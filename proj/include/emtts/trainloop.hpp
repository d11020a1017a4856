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

#ifndef EMTTS_TRAINLOOP_HPP_
#define EMTTS_TRAINLOOP_HPP_

#include <string>
#include <vector>

#include "emtts/adam.hpp"
#include "emtts/checkpoint.hpp"
#include "emtts/config.hpp"
#include "emtts/corpus.hpp"
#include "emtts/ssrn.hpp"
#include "emtts/t2s.hpp"

namespace emtts {

struct StepOptions {
  bool guided_attention = true;
  bool deterministic = false;  // disables dropout and zeroes the wall-clock column
  real dropout_rate = 0.05;
  uint64_t seed = 0;
  uint64_t step = 0;
  bool detach_attention = false;  // ablation probe: cut the gradient at A
};

struct T2SStepResult {
  real loss_hiera = 0.0;
  real loss_attn = 0.0;
  real diagonality = 0.0;
};

// One optimizer step over a batch of (token ids, coarse mel) pairs.
// Per-utterance subgraphs are averaged, so every loss mean runs over that
// utterance's true extent and padding never enters any term.
T2SStepResult t2s_train_step(T2SModel& model, AdamState& state, const AdamConfig& adam,
                             const std::vector<std::pair<std::vector<int>, Tensor>>& batch,
                             const StepOptions& opts);

struct SsrnBatchItem {
  Tensor coarse;   // in_bins x crop/4
  Tensor full;     // out_bins x crop
  int valid_cols;  // <= crop; shorter utterances are zero-padded and masked
};

real ssrn_train_step(SsrnModel& model, AdamState& state, const AdamConfig& adam,
                     const std::vector<SsrnBatchItem>& batch, const StepOptions& opts);

// Random training crop: the full-rate window start is divisible by the
// reduction factor and the coarse crop is exactly its decimated
// counterpart. Shorter utterances fall back to the whole clip, zero-padded
// up to crop_t with the pad excluded from the loss.
SsrnBatchItem sample_ssrn_crop(const Tensor& coarse, const Tensor& full, int crop_t,
                               int reduction, UniformStream& rng);

struct TrainResult {
  uint64_t final_step = 0;
  std::string last_checkpoint;
  real last_loss = 0.0;
};

// Runs the t2s or ssrn loop from `cfg`, writing step-<N>.emtt checkpoints
// every checkpoint_every steps and at termination, and appending one
// metrics line per step to metrics.tsv. `resume_from` continues an earlier
// run; per-step randomness is derived from (seed, step), so a resumed
// trajectory is identical to an uninterrupted one.
TrainResult train_loop(const RunConfig& cfg, const std::string& module,
                       const CorpusIndex& corpus, const std::string& out_dir,
                       const std::string& resume_from = "");

}  // namespace emtts

#endif  // EMTTS_TRAINLOOP_HPP_
