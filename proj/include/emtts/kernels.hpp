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

#ifndef EMTTS_KERNELS_HPP_
#define EMTTS_KERNELS_HPP_

#include "emtts/tensor.hpp"

// OpenMP-parallel compute kernels for the hot inner loops (1-D convolution,
// stride-2 transposed convolution, matmul). Every output element is written
// by exactly one thread and accumulated in a fixed sequential order, so
// results are bit-identical for any thread count and bit-identical to the
// serial reference kernels in kernels_ref.hpp.
//
// Tap convention (shared with emtts::ref):
//   causal:     y[co][t] = b[co] + sum_ci sum_j w[co][ci][j] * x[ci][t - (k-1-j)*dil]
//   non-causal: y[co][t] = b[co] + sum_ci sum_j w[co][ci][j] * x[ci][t + (j-(k-1)/2)*dil]
// Out-of-range input frames read as zero ("same"-length output). Non-causal
// requires odd k.
namespace emtts::kernels {

Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& bias,
                      int dilation, bool causal);
Tensor conv1d_backward_input(const Tensor& dy, const Tensor& w, int dilation, bool causal);
Tensor conv1d_backward_weight(const Tensor& dy, const Tensor& x, int k, int dilation,
                              bool causal);
Tensor conv1d_backward_bias(const Tensor& dy);

// Transposed convolution, stride 2, kernel 2:
//   y[co][2i+j] = sum_ci x[ci][i] * w[ci][co][j]
Tensor deconv2_forward(const Tensor& x, const Tensor& w);
Tensor deconv2_backward_input(const Tensor& dy, const Tensor& w);
Tensor deconv2_backward_weight(const Tensor& dy, const Tensor& x);

// C = op(A) * op(B) with op = transpose when the flag is set.
Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b);

}  // namespace emtts::kernels

#endif  // EMTTS_KERNELS_HPP_
