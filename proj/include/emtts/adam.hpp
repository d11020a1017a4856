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

#ifndef EMTTS_ADAM_HPP_
#define EMTTS_ADAM_HPP_

#include <vector>

#include "emtts/tape.hpp"

namespace emtts {

struct AdamConfig {
  real lr = 2e-4;
  real beta1 = 0.5;
  real beta2 = 0.9;
  real eps = 1e-6;
};

// First/second moments, parallel to the ModelParams creation order.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  uint64_t step = 0;

  static AdamState init(const ModelParams& params);
};

// One bias-corrected Adam update from the gradients currently stored in
// `params`. A non-finite gradient aborts the step with a diagnostic that
// names the parameter; parameters are untouched in that case.
void adam_step(ModelParams& params, AdamState& state, const AdamConfig& cfg);

}  // namespace emtts

#endif  // EMTTS_ADAM_HPP_
