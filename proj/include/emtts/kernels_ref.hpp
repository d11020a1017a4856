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

#ifndef EMTTS_KERNELS_REF_HPP_
#define EMTTS_KERNELS_REF_HPP_

#include "emtts/tensor.hpp"

// Serial reference kernels: plain loops, no OpenMP, kept deliberately simple.
// Tests assert bitwise equality against emtts::kernels and the benchmark tool
// compares throughput. Same tap convention as kernels.hpp.
namespace emtts::ref {

Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& bias,
                      int dilation, bool causal);
Tensor conv1d_backward_input(const Tensor& dy, const Tensor& w, int dilation, bool causal);
Tensor conv1d_backward_weight(const Tensor& dy, const Tensor& x, int k, int dilation,
                              bool causal);
Tensor conv1d_backward_bias(const Tensor& dy);

Tensor deconv2_forward(const Tensor& x, const Tensor& w);
Tensor deconv2_backward_input(const Tensor& dy, const Tensor& w);
Tensor deconv2_backward_weight(const Tensor& dy, const Tensor& x);

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b);

}  // namespace emtts::ref

#endif  // EMTTS_KERNELS_REF_HPP_
