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

#include "emtts/nn.hpp"

#include <cmath>

namespace emtts {

namespace {

real stable_sigmoid(real z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const real e = std::exp(z);
  return e / (1.0 + e);
}

std::string weight_name(const std::string& prefix, const LayerDesc& l) {
  return prefix + "." + l.name + ".weight";
}
std::string bias_name(const std::string& prefix, const LayerDesc& l) {
  return prefix + "." + l.name + ".bias";
}

}  // namespace

LayerDesc conv_layer(const std::string& name, int in_ch, int out_ch, int k, int dilation,
                     bool causal, Act act, bool dropout) {
  LayerDesc l;
  l.kind = LayerDesc::Kind::kConv;
  l.name = name;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.k = k;
  l.dilation = dilation;
  l.causal = causal;
  l.act = act;
  l.dropout = dropout;
  return l;
}

LayerDesc highway_layer(const std::string& name, int ch, int k, int dilation, bool causal) {
  LayerDesc l;
  l.kind = LayerDesc::Kind::kHighway;
  l.name = name;
  l.in_ch = ch;
  l.out_ch = ch;
  l.k = k;
  l.dilation = dilation;
  l.causal = causal;
  return l;
}

LayerDesc deconv_layer(const std::string& name, int in_ch, int out_ch) {
  LayerDesc l;
  l.kind = LayerDesc::Kind::kDeconv;
  l.name = name;
  l.in_ch = in_ch;
  l.out_ch = out_ch;
  l.k = 2;
  return l;
}

void create_stack_params(ModelParams& mp, const std::string& prefix,
                         const std::vector<LayerDesc>& stack, real init_stddev,
                         uint64_t seed) {
  for (const auto& l : stack) {
    std::vector<int> wshape;
    int bias_ch = 0;
    switch (l.kind) {
      case LayerDesc::Kind::kConv:
        wshape = {l.out_ch, l.in_ch, l.k};
        bias_ch = l.out_ch;
        break;
      case LayerDesc::Kind::kHighway:
        wshape = {2 * l.in_ch, l.in_ch, l.k};
        bias_ch = 2 * l.in_ch;
        break;
      case LayerDesc::Kind::kDeconv:
        wshape = {l.in_ch, l.out_ch, 2};
        bias_ch = l.out_ch;
        break;
    }
    const std::string wn = weight_name(prefix, l);
    mp.create(wn, Tensor::gaussian(wshape, init_stddev, mix_seed(seed, fnv1a64(wn))));
    mp.create(bias_name(prefix, l), Tensor::zeros({bias_ch}));
  }
}

Var ParamBinder::operator()(Parameter& p) {
  auto it = cache_.find(&p);
  if (it != cache_.end()) return it->second;
  Var v = tape_->param(p);
  cache_.emplace(&p, v);
  return v;
}

namespace {

Var apply_dropout(Tape& t, Var x, DropoutCtx* ctx) {
  if (!ctx || !ctx->enabled || ctx->rate <= 0.0) return x;
  UniformStream us(mix_seed(ctx->seed, ctx->step, static_cast<uint64_t>(ctx->counter++)));
  const Tensor& v = t.val(x);
  Tensor mask(v.shape());
  const real keep_scale = 1.0 / (1.0 - ctx->rate);
  for (auto& m : mask.vec()) m = (us.next_real01() < ctx->rate) ? 0.0 : keep_scale;
  return ops::mul(t, x, t.constant(std::move(mask)));
}

}  // namespace

Var run_stack(Tape& t, ParamBinder& bind, ModelParams& mp, const std::string& prefix,
              const std::vector<LayerDesc>& stack, Var x, DropoutCtx* dropout) {
  Var cur = x;
  for (const auto& l : stack) {
    Var w = bind(mp.get(weight_name(prefix, l)));
    Var b = bind(mp.get(bias_name(prefix, l)));
    switch (l.kind) {
      case LayerDesc::Kind::kConv:
        cur = ops::conv1d(t, cur, w, b, l.dilation, l.causal);
        break;
      case LayerDesc::Kind::kHighway:
        cur = ops::highway_conv(t, cur, w, b, l.dilation, l.causal);
        break;
      case LayerDesc::Kind::kDeconv:
        cur = ops::bias_add(t, ops::conv1d_transpose(t, cur, w), b);
        break;
    }
    if (l.act == Act::kRelu) cur = ops::relu(t, cur);
    if (l.act == Act::kSigmoid) cur = ops::sigmoid(t, cur);
    if (l.dropout) cur = apply_dropout(t, cur, dropout);
  }
  return cur;
}

IncrementalStackRunner::IncrementalStackRunner(const ModelParams& mp,
                                               const std::string& prefix,
                                               const std::vector<LayerDesc>& stack) {
  for (const auto& l : stack) {
    EMTTS_CHECK(l.kind != LayerDesc::Kind::kDeconv,
                "incremental runner supports causal conv stacks only");
    EMTTS_CHECK(l.causal || l.k == 1,
                "incremental runner requires causal layers (or k=1), got " << l.name);
    LayerState st;
    st.desc = &l;
    st.w = &mp.get(weight_name(prefix, l)).value;
    st.b = &mp.get(bias_name(prefix, l)).value;
    st.slots = (l.k - 1) * l.dilation + 1;
    st.history.assign(static_cast<size_t>(st.slots) * l.in_ch, 0.0);
    layers_.push_back(std::move(st));
  }
}

void IncrementalStackRunner::reset() {
  for (auto& st : layers_) {
    std::fill(st.history.begin(), st.history.end(), 0.0);
    st.frames_seen = 0;
  }
}

std::vector<real> IncrementalStackRunner::step(const std::vector<real>& frame) {
  std::vector<real> cur = frame;
  for (auto& st : layers_) {
    const LayerDesc& l = *st.desc;
    EMTTS_CHECK(static_cast<int>(cur.size()) == l.in_ch,
                "incremental step: layer " << l.name << " expects " << l.in_ch
                << " channels, got " << cur.size());
    const int64_t t = st.frames_seen;
    const int slot = static_cast<int>(t % st.slots);
    for (int c = 0; c < l.in_ch; ++c) st.history[static_cast<size_t>(slot) * l.in_ch + c] = cur[c];
    st.frames_seen++;

    const int out_ch = (l.kind == LayerDesc::Kind::kHighway) ? 2 * l.in_ch : l.out_ch;
    std::vector<real> pre(out_ch);
    const Tensor& w = *st.w;
    for (int co = 0; co < out_ch; ++co) {
      real acc = st.b->at(co);
      // Same tap order as the batched kernels: channel outer, tap inner.
      for (int ci = 0; ci < l.in_ch; ++ci) {
        for (int j = 0; j < l.k; ++j) {
          const int64_t s = t - static_cast<int64_t>(l.k - 1 - j) * l.dilation;
          if (s < 0) continue;
          const int hslot = static_cast<int>(s % st.slots);
          acc += w.at(co, ci, j) * st.history[static_cast<size_t>(hslot) * l.in_ch + ci];
        }
      }
      pre[co] = acc;
    }

    if (l.kind == LayerDesc::Kind::kHighway) {
      std::vector<real> out(l.in_ch);
      for (int c = 0; c < l.in_ch; ++c) {
        const real gate = stable_sigmoid(pre[c]);
        out[c] = gate * pre[l.in_ch + c] + (cur[c] - gate * cur[c]);
      }
      cur = std::move(out);
    } else {
      if (l.act == Act::kRelu)
        for (auto& v : pre) v = v > 0.0 ? v : 0.0;
      if (l.act == Act::kSigmoid)
        for (auto& v : pre) v = stable_sigmoid(v);
      cur = std::move(pre);
    }
  }
  return cur;
}

}  // namespace emtts
