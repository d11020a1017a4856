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

#include <cmath>

#include "emtts/gradcheck.hpp"
#include "emtts/ssrn.hpp"
#include "emtts/t2s.hpp"

namespace emtts {

namespace {

constexpr real kEps = 1e-5;

// A smooth scalar readout so gradients flow through every output entry.
Var readout(Tape& t, Var x) { return ops::mean_all(t, ops::sigmoid(t, x)); }

GradCheckEntry check_conv(const std::string& name, int k, int dilation, bool causal) {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({3, 2, k}, 0.5, 101));
  mp.create("b", Tensor::gaussian({3}, 0.5, 102));
  Tensor x = Tensor::gaussian({2, 17}, 1.0, 103);
  auto f = [&](Tape& t, ParamBinder& bind) {
    return readout(t, ops::conv1d(t, t.constant(x), bind(mp.get("w")), bind(mp.get("b")),
                                  dilation, causal));
  };
  return {name, grad_check(f, mp, kEps)};
}

GradCheckEntry check_deconv() {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({3, 2, 2}, 0.5, 111));
  Tensor x = Tensor::gaussian({3, 9}, 1.0, 112);
  auto f = [&](Tape& t, ParamBinder& bind) {
    return readout(t, ops::conv1d_transpose(t, t.constant(x), bind(mp.get("w"))));
  };
  return {"conv1d_transpose", grad_check(f, mp, kEps)};
}

GradCheckEntry check_highway(bool causal) {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({8, 4, 3}, 0.5, 121));
  mp.create("b", Tensor::gaussian({8}, 0.5, 122));
  Tensor x = Tensor::gaussian({4, 13}, 1.0, 123);
  auto f = [&](Tape& t, ParamBinder& bind) {
    return readout(t, ops::highway_conv(t, t.constant(x), bind(mp.get("w")),
                                        bind(mp.get("b")), 3, causal));
  };
  return {causal ? "highway_conv causal" : "highway_conv non-causal",
          grad_check(f, mp, kEps)};
}

GradCheckEntry check_attention() {
  ModelParams mp;
  mp.create("k", Tensor::gaussian({4, 3}, 1.0, 131));
  mp.create("v", Tensor::gaussian({4, 3}, 1.0, 132));
  mp.create("q", Tensor::gaussian({4, 5}, 1.0, 133));
  auto f = [&](Tape& t, ParamBinder& bind) {
    auto att = T2SModel::attend(t, bind(mp.get("k")), bind(mp.get("v")), bind(mp.get("q")));
    return readout(t, att.rp);
  };
  return {"attend (softmax columns)", grad_check(f, mp, kEps)};
}

GradCheckEntry check_embedding() {
  ModelParams mp;
  mp.create("e", Tensor::gaussian({5, 4}, 1.0, 141));
  const std::vector<int> ids = {0, 3, 3, 1, 4};
  auto f = [&](Tape& t, ParamBinder& bind) {
    return readout(t, ops::embedding(t, bind(mp.get("e")), ids));
  };
  return {"embedding", grad_check(f, mp, kEps)};
}

GradCheckEntry check_losses() {
  ModelParams mp;
  mp.create("z", Tensor::gaussian({4, 6}, 1.5, 151));
  Tensor target = Tensor::gaussian({4, 6}, 0.15, 152);
  for (auto& v : target.vec()) v = std::clamp(v + 0.5, 0.0, 1.0);
  auto f = [&](Tape& t, ParamBinder& bind) {
    Var z = bind(mp.get("z"));
    return loss_hiera(t, z, ops::sigmoid(t, z), target);
  };
  return {"loss_hiera", grad_check(f, mp, kEps)};
}

GradCheckEntry check_guided_attention() {
  ModelParams mp;
  mp.create("s", Tensor::gaussian({5, 7}, 1.0, 161));
  auto f = [&](Tape& t, ParamBinder& bind) {
    Var a = ops::softmax_columns(t, bind(mp.get("s")));
    return guided_attention_loss(t, a);
  };
  return {"guided_attention_loss", grad_check(f, mp, kEps)};
}

T2SConfig toy_t2s_config() {
  T2SConfig cfg;
  cfg.e = 4;
  cfg.d = 4;
  cfg.mel_bins = 3;
  cfg.dropout_rate = 0.0;
  cfg.init_stddev = 0.2;
  return cfg;
}

// Finite differences need healthy magnitudes: at the zero-bias init, ReLU
// units can sit exactly on their kink (subgradient and one-sided secant
// legitimately disagree), and both tiny and saturated activations push
// gradients toward the 1e-8 floor where secant noise dominates. Randomize
// every parameter at fan-in scale so activations stay O(1).
void randomize_params(ModelParams& mp, uint64_t seed) {
  for (size_t i = 0; i < mp.count(); ++i) {
    Parameter& p = mp.at(i);
    const auto& shape = p.value.shape();
    real stddev = 0.2;
    if (shape.size() > 1) {
      int64_t fan = 1;
      for (size_t d = 1; d < shape.size(); ++d) fan *= shape[d];
      stddev = 0.8 / std::sqrt(static_cast<real>(fan));
    }
    p.value = Tensor::gaussian(p.value.shape(), stddev, mix_seed(seed, fnv1a64(p.name)));
  }
}

// Checked scalar = full loss / 64. Central differences resolve a gradient
// only down to |f|*macheps/(2 eps) ~ 5e-12 absolute; against the fixed
// 1e-8 denominator floor that is a few 1e-4 of spurious error for
// near-zero-influence coordinates. Shrinking |f| shrinks the secant noise
// proportionally while a wrong backward rule still shows up at O(1).
constexpr real kComposedScale = 1.0 / 64.0;

GradCheckEntry check_full_t2s() {
  // 2-character, 3-frame toy configuration over the full training loss,
  // every coordinate of every parameter.
  T2SModel model(toy_t2s_config(), 4, 777);
  randomize_params(model.params(), 901);
  const std::vector<int> ids = {2, 3};
  Tensor target = Tensor::gaussian({3, 3}, 0.1, 171);
  for (auto& v : target.vec()) v = std::clamp(v + 0.5, 0.0, 1.0);
  auto f = [&](Tape& t, ParamBinder& bind) {
    auto fwd = model.forward(t, bind, ids, shift_right_one(target));
    Var lh = loss_hiera(t, fwd.logits, fwd.y, target);
    return ops::scale(t, ops::add(t, lh, guided_attention_loss(t, fwd.attention)),
                      kComposedScale);
  };
  return {"full t2s loss (toy)", grad_check(f, model.params(), kEps, 1 << 20, 7)};
}

GradCheckEntry check_full_ssrn() {
  SsrnConfig cfg;
  cfg.c = 8;
  cfg.in_bins = 4;
  cfg.out_bins = 9;
  cfg.dropout_rate = 0.0;
  cfg.init_stddev = 0.2;
  SsrnModel model(cfg, 778);
  randomize_params(model.params(), 902);
  Tensor coarse = Tensor::gaussian({4, 3}, 0.2, 181);
  for (auto& v : coarse.vec()) v = std::clamp(v + 0.5, 0.0, 1.0);
  Tensor target = Tensor::gaussian({9, 12}, 0.1, 182);
  for (auto& v : target.vec()) v = std::clamp(v + 0.5, 0.0, 1.0);
  auto f = [&](Tape& t, ParamBinder& bind) {
    auto fwd = model.forward(t, bind, t.constant(coarse));
    return ops::scale(t, loss_hiera(t, fwd.logits, fwd.y, target), kComposedScale);
  };
  return {"full ssrn loss (toy)", grad_check(f, model.params(), kEps, 1 << 20, 8)};
}

}  // namespace

std::vector<GradCheckEntry> gradcheck_suite() {
  std::vector<GradCheckEntry> out;
  out.push_back(check_conv("conv1d k=1", 1, 1, false));
  out.push_back(check_conv("conv1d causal k=3 d=2", 3, 2, true));
  out.push_back(check_conv("conv1d non-causal k=3 d=3", 3, 3, false));
  out.push_back(check_deconv());
  out.push_back(check_highway(true));
  out.push_back(check_highway(false));
  out.push_back(check_attention());
  out.push_back(check_embedding());
  out.push_back(check_losses());
  out.push_back(check_guided_attention());
  out.push_back(check_full_t2s());
  out.push_back(check_full_ssrn());
  return out;
}

}  // namespace emtts
