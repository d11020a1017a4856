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

#include "emtts/kernels.hpp"

namespace emtts::kernels {

namespace {

// Frame offset of tap j relative to the output frame.
inline int tap_offset(int j, int k, int dilation, bool causal) {
  return causal ? -(k - 1 - j) * dilation : (j - (k - 1) / 2) * dilation;
}

void check_conv_args(const Tensor& x, const Tensor& w, const Tensor* bias,
                     int dilation, bool causal) {
  EMTTS_CHECK(x.rank() == 2, "conv1d: input must be rank 2, got " << x.shape_str());
  EMTTS_CHECK(w.rank() == 3, "conv1d: weight must be rank 3, got " << w.shape_str());
  EMTTS_CHECK(dilation >= 1, "conv1d: dilation must be positive, got " << dilation);
  const int k = w.extent(2);
  EMTTS_CHECK(k >= 1, "conv1d: kernel size must be >= 1, got " << k);
  EMTTS_CHECK(causal || k % 2 == 1,
              "conv1d: non-causal convolution requires odd kernel size, got k=" << k);
  EMTTS_CHECK(w.extent(1) == x.extent(0),
              "conv1d: channel mismatch, input has " << x.extent(0)
              << " channels but weight expects " << w.extent(1));
  if (bias) {
    EMTTS_CHECK(bias->rank() == 1 && bias->extent(0) == w.extent(0),
                "conv1d: bias shape " << bias->shape_str() << " does not match "
                << w.extent(0) << " output channels");
  }
}

void check_deconv_args(const Tensor& x, const Tensor& w) {
  EMTTS_CHECK(x.rank() == 2, "deconv2: input must be rank 2, got " << x.shape_str());
  EMTTS_CHECK(w.rank() == 3 && w.extent(2) == 2,
              "deconv2: weight must be C_in x C_out x 2, got " << w.shape_str());
  EMTTS_CHECK(w.extent(0) == x.extent(0),
              "deconv2: channel mismatch, input has " << x.extent(0)
              << " channels but weight expects " << w.extent(0));
}

// Work below this many multiply-adds is not worth a parallel region.
constexpr int64_t kParallelThreshold = 1 << 14;

}  // namespace

Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& bias,
                      int dilation, bool causal) {
  check_conv_args(x, w, &bias, dilation, causal);
  const int c_in = x.extent(0), t_len = x.extent(1);
  const int c_out = w.extent(0), k = w.extent(2);
  Tensor y({c_out, t_len});
  const int64_t work = static_cast<int64_t>(c_out) * t_len * c_in * k;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int co = 0; co < c_out; ++co) {
    for (int t = 0; t < t_len; ++t) {
      real acc = bias.at(co);
      for (int ci = 0; ci < c_in; ++ci) {
        for (int j = 0; j < k; ++j) {
          const int s = t + tap_offset(j, k, dilation, causal);
          if (s >= 0 && s < t_len) acc += w.at(co, ci, j) * x.at(ci, s);
        }
      }
      y.at(co, t) = acc;
    }
  }
  return y;
}

Tensor conv1d_backward_input(const Tensor& dy, const Tensor& w, int dilation, bool causal) {
  const int c_out = w.extent(0), c_in = w.extent(1), k = w.extent(2);
  const int t_len = dy.extent(1);
  EMTTS_CHECK(dy.extent(0) == c_out, "conv1d_backward_input: channel mismatch");
  Tensor dx({c_in, t_len});
  const int64_t work = static_cast<int64_t>(c_in) * t_len * c_out * k;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int ci = 0; ci < c_in; ++ci) {
    for (int s = 0; s < t_len; ++s) {
      real acc = 0.0;
      for (int co = 0; co < c_out; ++co) {
        for (int j = 0; j < k; ++j) {
          const int t = s - tap_offset(j, k, dilation, causal);
          if (t >= 0 && t < t_len) acc += w.at(co, ci, j) * dy.at(co, t);
        }
      }
      dx.at(ci, s) = acc;
    }
  }
  return dx;
}

Tensor conv1d_backward_weight(const Tensor& dy, const Tensor& x, int k, int dilation,
                              bool causal) {
  const int c_out = dy.extent(0), c_in = x.extent(0), t_len = x.extent(1);
  EMTTS_CHECK(dy.extent(1) == t_len, "conv1d_backward_weight: length mismatch");
  Tensor dw({c_out, c_in, k});
  const int64_t work = static_cast<int64_t>(c_out) * c_in * k * t_len;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int co = 0; co < c_out; ++co) {
    for (int ci = 0; ci < c_in; ++ci) {
      for (int j = 0; j < k; ++j) {
        const int off = tap_offset(j, k, dilation, causal);
        real acc = 0.0;
        for (int t = 0; t < t_len; ++t) {
          const int s = t + off;
          if (s >= 0 && s < t_len) acc += dy.at(co, t) * x.at(ci, s);
        }
        dw.at(co, ci, j) = acc;
      }
    }
  }
  return dw;
}

Tensor conv1d_backward_bias(const Tensor& dy) {
  const int c_out = dy.extent(0), t_len = dy.extent(1);
  Tensor db({c_out});
#pragma omp parallel for schedule(static) if (static_cast<int64_t>(c_out) * t_len > kParallelThreshold)
  for (int co = 0; co < c_out; ++co) {
    real acc = 0.0;
    for (int t = 0; t < t_len; ++t) acc += dy.at(co, t);
    db.at(co) = acc;
  }
  return db;
}

Tensor deconv2_forward(const Tensor& x, const Tensor& w) {
  check_deconv_args(x, w);
  const int c_in = x.extent(0), t_len = x.extent(1), c_out = w.extent(1);
  Tensor y({c_out, 2 * t_len});
  const int64_t work = static_cast<int64_t>(c_out) * t_len * c_in * 2;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int co = 0; co < c_out; ++co) {
    for (int s = 0; s < 2 * t_len; ++s) {
      const int i = s / 2, j = s % 2;
      real acc = 0.0;
      for (int ci = 0; ci < c_in; ++ci) acc += x.at(ci, i) * w.at(ci, co, j);
      y.at(co, s) = acc;
    }
  }
  return y;
}

Tensor deconv2_backward_input(const Tensor& dy, const Tensor& w) {
  const int c_in = w.extent(0), c_out = w.extent(1);
  EMTTS_CHECK(dy.extent(0) == c_out && dy.extent(1) % 2 == 0,
              "deconv2_backward_input: bad upstream gradient shape " << dy.shape_str());
  const int t_len = dy.extent(1) / 2;
  Tensor dx({c_in, t_len});
  const int64_t work = static_cast<int64_t>(c_in) * t_len * c_out * 2;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int ci = 0; ci < c_in; ++ci) {
    for (int i = 0; i < t_len; ++i) {
      real acc = 0.0;
      for (int co = 0; co < c_out; ++co)
        for (int j = 0; j < 2; ++j) acc += dy.at(co, 2 * i + j) * w.at(ci, co, j);
      dx.at(ci, i) = acc;
    }
  }
  return dx;
}

Tensor deconv2_backward_weight(const Tensor& dy, const Tensor& x) {
  const int c_in = x.extent(0), t_len = x.extent(1), c_out = dy.extent(0);
  EMTTS_CHECK(dy.extent(1) == 2 * t_len, "deconv2_backward_weight: length mismatch");
  Tensor dw({c_in, c_out, 2});
  const int64_t work = static_cast<int64_t>(c_in) * c_out * 2 * t_len;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int ci = 0; ci < c_in; ++ci) {
    for (int co = 0; co < c_out; ++co) {
      for (int j = 0; j < 2; ++j) {
        real acc = 0.0;
        for (int i = 0; i < t_len; ++i) acc += x.at(ci, i) * dy.at(co, 2 * i + j);
        dw.at(ci, co, j) = acc;
      }
    }
  }
  return dw;
}

Tensor matmul(const Tensor& a, const Tensor& b, bool trans_a, bool trans_b) {
  EMTTS_CHECK(a.rank() == 2 && b.rank() == 2,
              "matmul: rank-2 operands required, got " << a.shape_str() << " and "
              << b.shape_str());
  const int m = trans_a ? a.extent(1) : a.extent(0);
  const int ka = trans_a ? a.extent(0) : a.extent(1);
  const int kb = trans_b ? b.extent(1) : b.extent(0);
  const int n = trans_b ? b.extent(0) : b.extent(1);
  EMTTS_CHECK(ka == kb, "matmul: inner dimension mismatch " << ka << " vs " << kb);
  Tensor c({m, n});
  const int64_t work = static_cast<int64_t>(m) * n * ka;
#pragma omp parallel for collapse(2) schedule(static) if (work > kParallelThreshold)
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      real acc = 0.0;
      for (int l = 0; l < ka; ++l) {
        const real av = trans_a ? a.at(l, i) : a.at(i, l);
        const real bv = trans_b ? b.at(j, l) : b.at(l, j);
        acc += av * bv;
      }
      c.at(i, j) = acc;
    }
  }
  return c;
}

}  // namespace emtts::kernels
