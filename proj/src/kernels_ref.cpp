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

#include "emtts/kernels_ref.hpp"

namespace emtts::ref {

namespace {
inline int tap_offset(int j, int k, int dilation, bool causal) {
  return causal ? -(k - 1 - j) * dilation : (j - (k - 1) / 2) * dilation;
}
}  // namespace

Tensor conv1d_forward(const Tensor& x, const Tensor& w, const Tensor& bias,
                      int dilation, bool causal) {
  const int c_in = x.extent(0), t_len = x.extent(1);
  const int c_out = w.extent(0), k = w.extent(2);
  Tensor y({c_out, t_len});
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
  Tensor dx({c_in, t_len});
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
  Tensor dw({c_out, c_in, k});
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
  for (int co = 0; co < c_out; ++co) {
    real acc = 0.0;
    for (int t = 0; t < t_len; ++t) acc += dy.at(co, t);
    db.at(co) = acc;
  }
  return db;
}

Tensor deconv2_forward(const Tensor& x, const Tensor& w) {
  const int c_in = x.extent(0), t_len = x.extent(1), c_out = w.extent(1);
  Tensor y({c_out, 2 * t_len});
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
  const int t_len = dy.extent(1) / 2;
  Tensor dx({c_in, t_len});
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
  Tensor dw({c_in, c_out, 2});
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
  const int m = trans_a ? a.extent(1) : a.extent(0);
  const int ka = trans_a ? a.extent(0) : a.extent(1);
  const int n = trans_b ? b.extent(0) : b.extent(1);
  Tensor c({m, n});
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

}  // namespace emtts::ref
