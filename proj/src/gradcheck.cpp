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

#include "emtts/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace emtts {

namespace {

real eval_loss(const LossBuilder& f, real* out = nullptr) {
  Tape t;
  ParamBinder bind(t);
  Var loss = f(t, bind);
  const real v = t.scalar(loss);
  EMTTS_CHECK(std::isfinite(v), "grad_check: loss is not finite");
  if (out) *out = v;
  return v;
}

}  // namespace

real grad_check(const LossBuilder& f, ModelParams& params, real eps,
                int max_coords_per_param, uint64_t seed, std::string* worst_coord) {
  EMTTS_CHECK(eps > 0, "grad_check: eps must be positive");
  params.zero_grad();
  {
    Tape t;
    ParamBinder bind(t);
    Var loss = f(t, bind);
    EMTTS_CHECK(std::isfinite(t.scalar(loss)), "grad_check: loss is not finite");
    t.backward(loss);
  }

  real max_rel = 0.0;
  std::string worst = "(none)";
  for (size_t pi = 0; pi < params.count(); ++pi) {
    Parameter& p = params.at(pi);
    const int64_t n = p.value.size();
    std::vector<int64_t> coords;
    if (n <= max_coords_per_param) {
      coords.resize(static_cast<size_t>(n));
      for (int64_t i = 0; i < n; ++i) coords[static_cast<size_t>(i)] = i;
    } else {
      UniformStream us(mix_seed(seed, fnv1a64(p.name)));
      for (int i = 0; i < max_coords_per_param; ++i) coords.push_back(us.next_int(0, n - 1));
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }
    for (int64_t c : coords) {
      const real saved = p.value.data()[c];
      p.value.data()[c] = saved + eps;
      const real lp = eval_loss(f);
      p.value.data()[c] = saved - eps;
      const real lm = eval_loss(f);
      p.value.data()[c] = saved;
      const real numeric = (lp - lm) / (2.0 * eps);
      EMTTS_CHECK(std::isfinite(numeric), "grad_check: numeric gradient not finite at "
                  << p.name << "[" << c << "]");
      const real analytic = p.grad.data()[c];
      EMTTS_CHECK(std::isfinite(analytic), "grad_check: analytic gradient not finite at "
                  << p.name << "[" << c << "]");
      const real denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
      const real rel = std::fabs(analytic - numeric) / denom;
      if (rel > max_rel) {
        max_rel = rel;
        worst = p.name + "[" + std::to_string(c) + "]";
      }
    }
  }
  if (worst_coord) *worst_coord = worst;
  return max_rel;
}

}  // namespace emtts
