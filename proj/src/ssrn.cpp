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

#include "emtts/ssrn.hpp"

namespace emtts {

std::vector<LayerDesc> ssrn_stack(const SsrnConfig& cfg) {
  std::vector<LayerDesc> s;
  s.push_back(conv_layer("conv1", cfg.in_bins, cfg.c, 1, 1, false, Act::kNone));
  s.push_back(highway_layer("hw1", cfg.c, 3, 1, false));
  s.push_back(highway_layer("hw2", cfg.c, 3, 3, false));
  int idx = 3;
  for (int up = 1; up <= 2; ++up) {
    s.push_back(deconv_layer("up" + std::to_string(up), cfg.c, cfg.c));
    s.push_back(highway_layer("hw" + std::to_string(idx++), cfg.c, 3, 1, false));
    s.push_back(highway_layer("hw" + std::to_string(idx++), cfg.c, 3, 3, false));
  }
  s.push_back(conv_layer("conv2", cfg.c, 2 * cfg.c, 1, 1, false, Act::kNone));
  s.push_back(highway_layer("hw" + std::to_string(idx++), 2 * cfg.c, 3, 1, false));
  s.push_back(highway_layer("hw" + std::to_string(idx++), 2 * cfg.c, 3, 1, false));
  s.push_back(conv_layer("conv3", 2 * cfg.c, cfg.out_bins, 1, 1, false, Act::kNone));
  s.push_back(conv_layer("conv4", cfg.out_bins, cfg.out_bins, 1, 1, false, Act::kRelu));
  s.push_back(conv_layer("conv5", cfg.out_bins, cfg.out_bins, 1, 1, false, Act::kRelu));
  s.push_back(conv_layer("logits", cfg.out_bins, cfg.out_bins, 1, 1, false, Act::kNone, false));
  return s;
}

SsrnModel::SsrnModel(SsrnConfig cfg, uint64_t init_seed) : cfg_(cfg) {
  cfg_.validate();
  create_stack_params(params_, "ssrn", ssrn_stack(cfg_), cfg_.init_stddev, init_seed);
}

SsrnModel::ForwardOut SsrnModel::forward(Tape& t, ParamBinder& bind, Var coarse,
                                         DropoutCtx* dropout) {
  const Tensor& in = t.val(coarse);
  EMTTS_CHECK(in.rank() == 2 && in.extent(0) == cfg_.in_bins,
              "ssrn_forward: expected " << cfg_.in_bins << " x T' input, got "
              << in.shape_str());
  ForwardOut out;
  out.logits = run_stack(t, bind, params_, "ssrn", ssrn_stack(cfg_), coarse, dropout);
  out.y = ops::sigmoid(t, out.logits);
  return out;
}

}  // namespace emtts
