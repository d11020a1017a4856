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

#include "emtts/adam.hpp"

#include <cmath>

namespace emtts {

AdamState AdamState::init(const ModelParams& params) {
  AdamState s;
  s.m.reserve(params.count());
  s.v.reserve(params.count());
  for (size_t i = 0; i < params.count(); ++i) {
    s.m.emplace_back(Tensor(params.at(i).value.shape()));
    s.v.emplace_back(Tensor(params.at(i).value.shape()));
  }
  return s;
}

void adam_step(ModelParams& params, AdamState& state, const AdamConfig& cfg) {
  EMTTS_CHECK(state.m.size() == params.count() && state.v.size() == params.count(),
              "adam state does not match parameter collection");
  for (size_t i = 0; i < params.count(); ++i) {
    const Parameter& p = params.at(i);
    EMTTS_CHECK(p.grad.all_finite(),
                "adam_step aborted: non-finite gradient in parameter " << p.name);
  }
  state.step++;
  const real bc1 = 1.0 - std::pow(cfg.beta1, static_cast<real>(state.step));
  const real bc2 = 1.0 - std::pow(cfg.beta2, static_cast<real>(state.step));
  for (size_t i = 0; i < params.count(); ++i) {
    Parameter& p = params.at(i);
    real* m = state.m[i].data();
    real* v = state.v[i].data();
    real* th = p.value.data();
    const real* g = p.grad.data();
    const int64_t n = p.value.size();
    for (int64_t j = 0; j < n; ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const real mhat = m[j] / bc1;
      const real vhat = v[j] / bc2;
      th[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace emtts
