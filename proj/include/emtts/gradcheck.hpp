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

#ifndef EMTTS_GRADCHECK_HPP_
#define EMTTS_GRADCHECK_HPP_

#include <functional>
#include <string>
#include <vector>

#include "emtts/nn.hpp"

namespace emtts {

// Scalar loss builder: records a forward pass on the tape, binding
// parameters through `bind`, and returns the loss node. Must be
// deterministic (dropout off).
using LossBuilder = std::function<Var(Tape&, ParamBinder&)>;

// Central-difference gradient check. Compares analytic gradients from one
// backward pass against (f(x+eps) - f(x-eps)) / (2 eps) on up to
// `max_coords_per_param` seeded sample coordinates per parameter, and
// returns the max over coordinates of
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// NaN anywhere is an error.
real grad_check(const LossBuilder& f, ModelParams& params, real eps,
                int max_coords_per_param = 64, uint64_t seed = 0,
                std::string* worst_coord = nullptr);

struct GradCheckEntry {
  std::string block;
  real max_rel_err;
};

// The full per-block suite behind the `gradcheck` CLI subcommand: every
// primitive block plus the composed toy-scale Text2Spectrum and SSRN
// losses. All entries are expected below 1e-4.
std::vector<GradCheckEntry> gradcheck_suite();

}  // namespace emtts

#endif  // EMTTS_GRADCHECK_HPP_
