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

#include "emtts/tape.hpp"

#include <cmath>
#include <utility>

#include "emtts/kernels.hpp"

namespace emtts {

Parameter& ModelParams::create(const std::string& name, Tensor init) {
  EMTTS_CHECK(!index_.count(name), "duplicate parameter name: " << name);
  items_.push_back(std::make_unique<Parameter>(name, std::move(init)));
  index_[name] = items_.size() - 1;
  return *items_.back();
}

Parameter& ModelParams::get(const std::string& name) {
  auto it = index_.find(name);
  EMTTS_CHECK(it != index_.end(), "unknown parameter: " << name);
  return *items_[it->second];
}

const Parameter& ModelParams::get(const std::string& name) const {
  auto it = index_.find(name);
  EMTTS_CHECK(it != index_.end(), "unknown parameter: " << name);
  return *items_[it->second];
}

int64_t ModelParams::total_size() const {
  int64_t n = 0;
  for (const auto& p : items_) n += p->value.size();
  return n;
}

void ModelParams::zero_grad() {
  for (auto& p : items_) p->grad.fill(0.0);
}

Var Tape::leaf(Tensor value, bool needs_grad) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(Parameter& p) {
  Var v = leaf(p.value, true);
  nodes_[v.idx].param = &p;
  return v;
}

Var Tape::make(Tensor value, const std::vector<Var>& inputs,
               std::function<void(Tape&, int)> bwd) {
  bool needs = false;
  for (Var in : inputs) needs = needs || nodes_[in.idx].needs_grad;
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs;
  if (needs) n.backward = std::move(bwd);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

real Tape::scalar(Var v) const {
  const Tensor& t = nodes_[v.idx].value;
  EMTTS_CHECK(t.size() == 1, "expected scalar, got shape " << t.shape_str());
  return t.at(0);
}

Tensor& Tape::grad(Var v) {
  Node& n = nodes_[v.idx];
  if (n.grad.empty()) n.grad = Tensor(n.value.shape());
  return n.grad;
}

void Tape::accum_grad(Var v, const Tensor& g) {
  Node& n = nodes_[v.idx];
  if (!n.needs_grad) return;
  EMTTS_CHECK(g.same_shape(n.value),
              "gradient shape " << g.shape_str() << " does not match value shape "
              << n.value.shape_str());
  Tensor& dst = grad(v);
  const real* src = g.data();
  real* d = dst.data();
  const int64_t sz = g.size();
  for (int64_t i = 0; i < sz; ++i) d[i] += src[i];
}

void Tape::backward(Var loss) {
  Node& ln = nodes_[loss.idx];
  EMTTS_CHECK(ln.value.size() == 1,
              "backward requires a scalar loss, got shape " << ln.value.shape_str());
  EMTTS_CHECK(std::isfinite(ln.value.at(0)), "backward: loss is not finite");
  grad(loss).at(0) += 1.0;
  for (int i = loss.idx; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad || n.grad.empty()) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param) {
      real* pg = n.param->grad.data();
      const real* g = n.grad.data();
      const int64_t sz = n.grad.size();
      for (int64_t j = 0; j < sz; ++j) pg[j] += g[j];
    }
  }
}

namespace ops {

namespace {

void check_same_shape(const Tape& t, Var a, Var b, const char* op) {
  EMTTS_CHECK(t.val(a).same_shape(t.val(b)),
              op << ": shape mismatch " << t.val(a).shape_str() << " vs "
                 << t.val(b).shape_str());
}

real stable_sigmoid(real z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const real e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Var add(Tape& t, Var a, Var b) {
  check_same_shape(t, a, b, "add");
  Tensor out = t.val(a);
  const real* pb = t.val(b).data();
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] += pb[i];
  return t.make(std::move(out), {a, b}, [a, b](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    g.accum_grad(a, go);
    g.accum_grad(b, go);
  });
}

Var sub(Tape& t, Var a, Var b) {
  check_same_shape(t, a, b, "sub");
  Tensor out = t.val(a);
  const real* pb = t.val(b).data();
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] -= pb[i];
  return t.make(std::move(out), {a, b}, [a, b](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    g.accum_grad(a, go);
    if (g.needs_grad(b)) {
      Tensor neg = go;
      for (auto& v : neg.vec()) v = -v;
      g.accum_grad(b, neg);
    }
  });
}

Var mul(Tape& t, Var a, Var b) {
  check_same_shape(t, a, b, "mul");
  Tensor out = t.val(a);
  const real* pb = t.val(b).data();
  for (int64_t i = 0; i < out.size(); ++i) out.data()[i] *= pb[i];
  return t.make(std::move(out), {a, b}, [a, b](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    if (g.needs_grad(a)) {
      Tensor da = go;
      const real* pb = g.val(b).data();
      for (int64_t i = 0; i < da.size(); ++i) da.data()[i] *= pb[i];
      g.accum_grad(a, da);
    }
    if (g.needs_grad(b)) {
      Tensor db = go;
      const real* pa = g.val(a).data();
      for (int64_t i = 0; i < db.size(); ++i) db.data()[i] *= pa[i];
      g.accum_grad(b, db);
    }
  });
}

Var scale(Tape& t, Var a, real c) {
  Tensor out = t.val(a);
  for (auto& v : out.vec()) v *= c;
  return t.make(std::move(out), {a}, [a, c](Tape& g, int self) {
    Tensor da = g.node(Var{self}).grad;
    for (auto& v : da.vec()) v *= c;
    g.accum_grad(a, da);
  });
}

Var bias_add(Tape& t, Var a, Var bias) {
  const Tensor& x = t.val(a);
  const Tensor& b = t.val(bias);
  EMTTS_CHECK(x.rank() == 2 && b.rank() == 1 && b.extent(0) == x.extent(0),
              "bias_add: bias " << b.shape_str() << " does not match rows of "
              << x.shape_str());
  Tensor out = x;
  for (int c = 0; c < x.extent(0); ++c)
    for (int i = 0; i < x.extent(1); ++i) out.at(c, i) += b.at(c);
  return t.make(std::move(out), {a, bias}, [a, bias](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    g.accum_grad(a, go);
    if (g.needs_grad(bias)) {
      Tensor db({go.extent(0)});
      for (int c = 0; c < go.extent(0); ++c) {
        real acc = 0.0;
        for (int i = 0; i < go.extent(1); ++i) acc += go.at(c, i);
        db.at(c) = acc;
      }
      g.accum_grad(bias, db);
    }
  });
}

Var relu(Tape& t, Var a) {
  Tensor out = t.val(a);
  for (auto& v : out.vec()) v = v > 0.0 ? v : 0.0;
  return t.make(std::move(out), {a}, [a](Tape& g, int self) {
    Tensor da = g.node(Var{self}).grad;
    const real* x = g.val(a).data();
    for (int64_t i = 0; i < da.size(); ++i)
      if (x[i] <= 0.0) da.data()[i] = 0.0;
    g.accum_grad(a, da);
  });
}

Var sigmoid(Tape& t, Var a) {
  Tensor out = t.val(a);
  for (auto& v : out.vec()) v = stable_sigmoid(v);
  return t.make(std::move(out), {a}, [a](Tape& g, int self) {
    Tensor da = g.node(Var{self}).grad;
    const real* y = g.node(Var{self}).value.data();
    for (int64_t i = 0; i < da.size(); ++i) da.data()[i] *= y[i] * (1.0 - y[i]);
    g.accum_grad(a, da);
  });
}

Var abs(Tape& t, Var a) {
  Tensor out = t.val(a);
  for (auto& v : out.vec()) v = std::fabs(v);
  return t.make(std::move(out), {a}, [a](Tape& g, int self) {
    Tensor da = g.node(Var{self}).grad;
    const real* x = g.val(a).data();
    for (int64_t i = 0; i < da.size(); ++i) {
      da.data()[i] *= (x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0));
    }
    g.accum_grad(a, da);
  });
}

Var sum_all(Tape& t, Var a) {
  Tensor out({1});
  out.at(0) = t.val(a).sum();
  return t.make(std::move(out), {a}, [a](Tape& g, int self) {
    const real go = g.node(Var{self}).grad.at(0);
    Tensor da(g.val(a).shape());
    da.fill(go);
    g.accum_grad(a, da);
  });
}

Var mean_all(Tape& t, Var a) {
  const real inv = 1.0 / static_cast<real>(t.val(a).size());
  return scale(t, sum_all(t, a), inv);
}

Var matmul(Tape& t, Var a, Var b, bool trans_a, bool trans_b) {
  Tensor out = kernels::matmul(t.val(a), t.val(b), trans_a, trans_b);
  return t.make(std::move(out), {a, b}, [a, b, trans_a, trans_b](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    // C = op(A) op(B); dA and dB are matmuls of go with the other operand.
    if (g.needs_grad(a)) {
      Tensor da = trans_a ? kernels::matmul(g.val(b), go, trans_b, true)
                          : kernels::matmul(go, g.val(b), false, !trans_b);
      g.accum_grad(a, da);
    }
    if (g.needs_grad(b)) {
      Tensor db = trans_b ? kernels::matmul(go, g.val(a), true, trans_a)
                          : kernels::matmul(g.val(a), go, !trans_a, false);
      g.accum_grad(b, db);
    }
  });
}

Var softmax_columns(Tape& t, Var a) {
  const Tensor& x = t.val(a);
  EMTTS_CHECK(x.rank() == 2, "softmax_columns: rank-2 input required, got " << x.shape_str());
  const int n = x.extent(0), m = x.extent(1);
  Tensor out({n, m});
  for (int j = 0; j < m; ++j) {
    real mx = x.at(0, j);
    for (int i = 1; i < n; ++i) mx = std::max(mx, x.at(i, j));
    real z = 0.0;
    for (int i = 0; i < n; ++i) {
      const real e = std::exp(x.at(i, j) - mx);
      out.at(i, j) = e;
      z += e;
    }
    for (int i = 0; i < n; ++i) out.at(i, j) /= z;
  }
  return t.make(std::move(out), {a}, [a](Tape& g, int self) {
    const Tensor& y = g.node(Var{self}).value;
    const Tensor& go = g.node(Var{self}).grad;
    const int n = y.extent(0), m = y.extent(1);
    Tensor da({n, m});
    for (int j = 0; j < m; ++j) {
      real dot = 0.0;
      for (int i = 0; i < n; ++i) dot += y.at(i, j) * go.at(i, j);
      for (int i = 0; i < n; ++i) da.at(i, j) = y.at(i, j) * (go.at(i, j) - dot);
    }
    g.accum_grad(a, da);
  });
}

Var concat_rows(Tape& t, Var a, Var b) {
  const Tensor& xa = t.val(a);
  const Tensor& xb = t.val(b);
  EMTTS_CHECK(xa.rank() == 2 && xb.rank() == 2 && xa.extent(1) == xb.extent(1),
              "concat_rows: column mismatch " << xa.shape_str() << " vs " << xb.shape_str());
  const int ra = xa.extent(0), rb = xb.extent(0), m = xa.extent(1);
  Tensor out({ra + rb, m});
  for (int i = 0; i < ra; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = xa.at(i, j);
  for (int i = 0; i < rb; ++i)
    for (int j = 0; j < m; ++j) out.at(ra + i, j) = xb.at(i, j);
  return t.make(std::move(out), {a, b}, [a, b, ra, rb, m](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    if (g.needs_grad(a)) {
      Tensor da({ra, m});
      for (int i = 0; i < ra; ++i)
        for (int j = 0; j < m; ++j) da.at(i, j) = go.at(i, j);
      g.accum_grad(a, da);
    }
    if (g.needs_grad(b)) {
      Tensor db({rb, m});
      for (int i = 0; i < rb; ++i)
        for (int j = 0; j < m; ++j) db.at(i, j) = go.at(ra + i, j);
      g.accum_grad(b, db);
    }
  });
}

Var slice_rows(Tape& t, Var a, int row0, int row1) {
  const Tensor& x = t.val(a);
  EMTTS_CHECK(x.rank() == 2 && 0 <= row0 && row0 < row1 && row1 <= x.extent(0),
              "slice_rows: bad range [" << row0 << "," << row1 << ") for " << x.shape_str());
  const int m = x.extent(1), r = row1 - row0;
  Tensor out({r, m});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < m; ++j) out.at(i, j) = x.at(row0 + i, j);
  return t.make(std::move(out), {a}, [a, row0, r, m](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    Tensor da(g.val(a).shape());
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < m; ++j) da.at(row0 + i, j) = go.at(i, j);
    g.accum_grad(a, da);
  });
}

Var conv1d(Tape& t, Var x, Var w, Var bias, int dilation, bool causal) {
  Tensor out = kernels::conv1d_forward(t.val(x), t.val(w), t.val(bias), dilation, causal);
  const int k = t.val(w).extent(2);
  return t.make(std::move(out), {x, w, bias},
                [x, w, bias, dilation, causal, k](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    if (g.needs_grad(x))
      g.accum_grad(x, kernels::conv1d_backward_input(go, g.val(w), dilation, causal));
    if (g.needs_grad(w))
      g.accum_grad(w, kernels::conv1d_backward_weight(go, g.val(x), k, dilation, causal));
    if (g.needs_grad(bias)) g.accum_grad(bias, kernels::conv1d_backward_bias(go));
  });
}

Var conv1d_transpose(Tape& t, Var x, Var w, int stride) {
  EMTTS_CHECK(stride == 2, "conv1d_transpose: only stride 2 is supported, got " << stride);
  Tensor out = kernels::deconv2_forward(t.val(x), t.val(w));
  return t.make(std::move(out), {x, w}, [x, w](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    if (g.needs_grad(x)) g.accum_grad(x, kernels::deconv2_backward_input(go, g.val(w)));
    if (g.needs_grad(w)) g.accum_grad(w, kernels::deconv2_backward_weight(go, g.val(x)));
  });
}

Var embedding(Tape& t, Var table, const std::vector<int>& ids) {
  const Tensor& e = t.val(table);
  EMTTS_CHECK(e.rank() == 2, "embedding: table must be rank 2");
  EMTTS_CHECK(!ids.empty(), "embedding: empty id sequence");
  const int vocab = e.extent(0), dim = e.extent(1), n = static_cast<int>(ids.size());
  for (int id : ids)
    EMTTS_CHECK(0 <= id && id < vocab, "embedding: token id " << id
                << " outside vocabulary of size " << vocab);
  Tensor out({dim, n});
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < dim; ++i) out.at(i, j) = e.at(ids[j], i);
  return t.make(std::move(out), {table}, [table, ids, dim, n](Tape& g, int self) {
    const Tensor& go = g.node(Var{self}).grad;
    Tensor de(g.val(table).shape());
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < dim; ++i) de.at(ids[j], i) += go.at(i, j);
    g.accum_grad(table, de);
  });
}

Var highway_conv(Tape& t, Var x, Var w, Var bias, int dilation, bool causal) {
  const int c = t.val(x).extent(0);
  EMTTS_CHECK(t.val(w).extent(0) == 2 * c,
              "highway_conv: conv must produce 2x" << c << " channels, weight is "
              << t.val(w).shape_str());
  Var h = conv1d(t, x, w, bias, dilation, causal);
  Var h1 = slice_rows(t, h, 0, c);
  Var h2 = slice_rows(t, h, c, 2 * c);
  Var gate = sigmoid(t, h1);
  Var gated = mul(t, gate, h2);
  // (1 - gate) * x = x - gate * x
  Var passed = sub(t, x, mul(t, gate, x));
  return add(t, gated, passed);
}

Var detach(Tape& t, Var a) { return t.leaf(t.val(a), false); }

Var binary_divergence_mean(Tape& t, Var logits, const Tensor& target,
                           const Tensor* weights, real count) {
  const Tensor& z = t.val(logits);
  EMTTS_CHECK(z.same_shape(target), "binary_divergence: target shape "
              << target.shape_str() << " does not match logits " << z.shape_str());
  EMTTS_CHECK(count > 0, "binary_divergence: count must be positive");
  for (int64_t i = 0; i < target.size(); ++i) {
    const real s = target.data()[i];
    EMTTS_CHECK(s >= 0.0 && s <= 1.0,
                "binary_divergence: target value " << s << " outside [0,1]");
  }
  Tensor tgt = target;
  Tensor wts = weights ? *weights : Tensor();
  real acc = 0.0;
  for (int64_t i = 0; i < z.size(); ++i) {
    const real zi = z.data()[i];
    const real si = tgt.data()[i];
    const real wi = wts.empty() ? 1.0 : wts.data()[i];
    acc += wi * (std::max(zi, 0.0) - si * zi + std::log1p(std::exp(-std::fabs(zi))));
  }
  Tensor out({1});
  out.at(0) = acc / count;
  return t.make(std::move(out), {logits},
                [logits, tgt = std::move(tgt), wts = std::move(wts), count](Tape& g, int self) {
    const real go = g.node(Var{self}).grad.at(0);
    const Tensor& z = g.val(logits);
    Tensor dz(z.shape());
    for (int64_t i = 0; i < z.size(); ++i) {
      const real wi = wts.empty() ? 1.0 : wts.data()[i];
      dz.data()[i] = go * wi * (stable_sigmoid(z.data()[i]) - tgt.data()[i]) / count;
    }
    g.accum_grad(logits, dz);
  });
}

Var l1_mean(Tape& t, Var y, const Tensor& target, const Tensor* weights, real count) {
  const Tensor& v = t.val(y);
  EMTTS_CHECK(v.same_shape(target), "l1_mean: target shape mismatch");
  EMTTS_CHECK(count > 0, "l1_mean: count must be positive");
  Tensor tgt = target;
  Tensor wts = weights ? *weights : Tensor();
  real acc = 0.0;
  for (int64_t i = 0; i < v.size(); ++i) {
    const real wi = wts.empty() ? 1.0 : wts.data()[i];
    acc += wi * std::fabs(v.data()[i] - tgt.data()[i]);
  }
  Tensor out({1});
  out.at(0) = acc / count;
  return t.make(std::move(out), {y},
                [y, tgt = std::move(tgt), wts = std::move(wts), count](Tape& g, int self) {
    const real go = g.node(Var{self}).grad.at(0);
    const Tensor& v = g.val(y);
    Tensor dy(v.shape());
    for (int64_t i = 0; i < v.size(); ++i) {
      const real wi = wts.empty() ? 1.0 : wts.data()[i];
      const real d = v.data()[i] - tgt.data()[i];
      dy.data()[i] = go * wi * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) / count;
    }
    g.accum_grad(y, dy);
  });
}

}  // namespace ops

}  // namespace emtts
