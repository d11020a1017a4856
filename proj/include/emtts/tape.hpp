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

#ifndef EMTTS_TAPE_HPP_
#define EMTTS_TAPE_HPP_

#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "emtts/tensor.hpp"

namespace emtts {

// A named trainable tensor with its gradient slot. Gradients accumulate
// across backward() calls until zero_grad().
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
};

// Ordered collection of uniquely named parameters. Iteration order is
// creation order, which fixes the optimizer update order and the
// checkpoint layout.
class ModelParams {
 public:
  Parameter& create(const std::string& name, Tensor init);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool has(const std::string& name) const { return index_.count(name) > 0; }

  size_t count() const { return items_.size(); }
  int64_t total_size() const;
  Parameter& at(size_t i) { return *items_[i]; }
  const Parameter& at(size_t i) const { return *items_[i]; }

  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter>> items_;
  std::unordered_map<std::string, size_t> index_;
};

// Handle to a node on a Tape.
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

// Reverse-mode tape over whole-tensor primitives. Nodes are appended in
// evaluation order, which is a topological order by construction; backward
// sweeps the list once in reverse.
class Tape {
 public:
  struct Node {
    Tensor value;
    Tensor grad;  // allocated on first accumulation
    bool needs_grad = false;
    Parameter* param = nullptr;
    std::function<void(Tape&, int)> backward;  // null for leaves
  };

  Var leaf(Tensor value, bool needs_grad = false);
  Var constant(Tensor value) { return leaf(std::move(value), false); }
  // Leaf bound to a Parameter; after backward() the node gradient is
  // accumulated into p.grad.
  Var param(Parameter& p);

  // Generic node factory; `bwd` may be null for non-differentiable results.
  // Also the extension point for test-only ops.
  Var make(Tensor value, const std::vector<Var>& inputs,
           std::function<void(Tape&, int)> bwd);

  const Tensor& val(Var v) const { return nodes_[v.idx].value; }
  Node& node(Var v) { return nodes_[v.idx]; }
  bool needs_grad(Var v) const { return nodes_[v.idx].needs_grad; }
  real scalar(Var v) const;
  int size() const { return static_cast<int>(nodes_.size()); }

  // Gradient of node v; allocated zero-filled on first use.
  Tensor& grad(Var v);
  void accum_grad(Var v, const Tensor& g);

  // Reverse sweep from a scalar loss. Populates parameter gradients
  // (accumulating into whatever is already there). Rejects non-scalar
  // losses and propagates a NaN/Inf check over the seeded loss value.
  void backward(Var loss);

 private:
  std::vector<Node> nodes_;
};

// Tensor primitives recorded on the tape. All shape errors throw.
namespace ops {

Var add(Tape& t, Var a, Var b);
Var sub(Tape& t, Var a, Var b);
Var mul(Tape& t, Var a, Var b);
Var scale(Tape& t, Var a, real c);
// y[c,t] = a[c,t] + bias[c]
Var bias_add(Tape& t, Var a, Var bias);
Var relu(Tape& t, Var a);
Var sigmoid(Tape& t, Var a);
Var abs(Tape& t, Var a);
Var sum_all(Tape& t, Var a);
Var mean_all(Tape& t, Var a);
Var matmul(Tape& t, Var a, Var b, bool trans_a = false, bool trans_b = false);
// Softmax over rows within each column; max-subtracted for stability.
Var softmax_columns(Tape& t, Var a);
Var concat_rows(Tape& t, Var a, Var b);
Var slice_rows(Tape& t, Var a, int row0, int row1);
// 1-D convolution, "same" length; see kernels.hpp for the tap convention.
Var conv1d(Tape& t, Var x, Var w, Var bias, int dilation, bool causal);
// Transposed convolution with stride = kernel = 2; doubles the length.
// Any other stride is rejected.
Var conv1d_transpose(Tape& t, Var x, Var w, int stride = 2);
// E is vocab x e; output is e x N with column n = E[ids[n], :].
Var embedding(Tape& t, Var table, const std::vector<int>& ids);
// Gated highway convolution around x (C x T):
//   H = conv(x) with 2C output channels, H1 = rows [0,C), H2 = rows [C,2C)
//   out = sigmoid(H1) * H2 + (1 - sigmoid(H1)) * x
Var highway_conv(Tape& t, Var x, Var w, Var bias, int dilation, bool causal);
// Stops gradient flow: value copy with no backward edge.
Var detach(Tape& t, Var a);

// Mean over weighted entries of the stable binary divergence
//   max(z,0) - s*z + log(1+exp(-|z|))
// with d/dz = sigmoid(z) - s. `weights` may be null (all ones); `count`
// is the divisor of the mean (number of valid entries).
Var binary_divergence_mean(Tape& t, Var logits, const Tensor& target,
                           const Tensor* weights, real count);
// Mean over weighted entries of |y - target|.
Var l1_mean(Tape& t, Var y, const Tensor& target, const Tensor* weights, real count);

}  // namespace ops

}  // namespace emtts

#endif  // EMTTS_TAPE_HPP_
