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

#ifndef EMTTS_SSRN_HPP_
#define EMTTS_SSRN_HPP_

#include <vector>

#include "emtts/nn.hpp"

namespace emtts {

struct SsrnConfig {
  int c = 512;        // hidden channels
  int in_bins = 80;   // coarse mel bins
  int out_bins = 513; // linear bins, or n_mels when the mel output mode is on
  real dropout_rate = 0.05;
  real init_stddev = 0.02;

  void validate() const {
    EMTTS_CHECK(c > 0 && in_bins > 0 && out_bins > 0, "ssrn dims must be positive");
  }
};

// Channel growth handles frequency upsampling; two stride-2 transposed
// convolutions quadruple the time axis. All layers non-causal.
std::vector<LayerDesc> ssrn_stack(const SsrnConfig& cfg);

class SsrnModel {
 public:
  SsrnModel(SsrnConfig cfg, uint64_t init_seed);

  const SsrnConfig& config() const { return cfg_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }

  struct ForwardOut {
    Var logits;  // out_bins x 4T'
    Var y;       // sigmoid(logits)
  };
  ForwardOut forward(Tape& t, ParamBinder& bind, Var coarse, DropoutCtx* dropout = nullptr);

 private:
  SsrnConfig cfg_;
  ModelParams params_;
};

}  // namespace emtts

#endif  // EMTTS_SSRN_HPP_
