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

#include <doctest.h>

#include "emtts/kernels.hpp"
#include "emtts/kernels_ref.hpp"

using namespace emtts;

namespace {

// Test-owned brute-force convolution, independent of both kernel lanes.
Tensor oracle_conv1d(const Tensor& x, const Tensor& w, const Tensor& b, int dil, bool causal) {
  const int cin = x.extent(0), t_len = x.extent(1);
  const int cout = w.extent(0), k = w.extent(2);
  Tensor y({cout, t_len});
  for (int co = 0; co < cout; ++co)
    for (int t = 0; t < t_len; ++t) {
      real acc = b.at(co);
      for (int ci = 0; ci < cin; ++ci)
        for (int j = 0; j < k; ++j) {
          const int s = causal ? t - (k - 1 - j) * dil : t + (j - (k - 1) / 2) * dil;
          if (s >= 0 && s < t_len) acc += w.at(co, ci, j) * x.at(ci, s);
        }
      y.at(co, t) = acc;
    }
  return y;
}

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) return false;
  for (int64_t i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return false;
  return true;
}

real max_abs_diff(const Tensor& a, const Tensor& b) {
  REQUIRE(a.same_shape(b));
  real m = 0.0;
  for (int64_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace

TEST_CASE("conv1d identity kernel k=1") {
  Tensor x = Tensor::gaussian({3, 7}, 1.0, 11);
  Tensor w({3, 3, 1});
  for (int i = 0; i < 3; ++i) w.at(i, i, 0) = 1.0;
  Tensor b({3});
  Tensor y = kernels::conv1d_forward(x, w, b, 1, false);
  CHECK(bitwise_equal(x, y));
}

TEST_CASE("causal k=2 delay tap convention") {
  // taps [w_past, w_now] = [1, 0] delays by one frame
  Tensor x({1, 3});
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 2.0;
  x.at(0, 2) = 3.0;
  Tensor w({1, 1, 2});
  w.at(0, 0, 0) = 1.0;
  w.at(0, 0, 1) = 0.0;
  Tensor b({1});
  Tensor y = kernels::conv1d_forward(x, w, b, 1, true);
  CHECK(y.at(0, 0) == 0.0);
  CHECK(y.at(0, 1) == 1.0);
  CHECK(y.at(0, 2) == 2.0);
}

TEST_CASE("non-causal dilated conv matches brute-force oracle") {
  Tensor x = Tensor::gaussian({4, 20}, 1.0, 21);
  Tensor w = Tensor::gaussian({5, 4, 3}, 0.7, 22);
  Tensor b = Tensor::gaussian({5}, 0.3, 23);
  Tensor y = kernels::conv1d_forward(x, w, b, 2, false);
  Tensor o = oracle_conv1d(x, w, b, 2, false);
  CHECK(max_abs_diff(y, o) < 1e-12);
}

TEST_CASE("conv1d same-length contract over k and dilation grid") {
  for (int k : {1, 3}) {
    for (int d : {1, 3, 9, 27}) {
      for (bool causal : {false, true}) {
        Tensor x = Tensor::gaussian({2, 61}, 1.0, 31);
        Tensor w = Tensor::gaussian({2, 2, k}, 0.5, 32);
        Tensor b({2});
        Tensor y = kernels::conv1d_forward(x, w, b, d, causal);
        CHECK(y.extent(1) == 61);
      }
    }
  }
}

TEST_CASE("conv1d argument validation") {
  Tensor x({2, 5});
  Tensor w_even({2, 2, 2});
  Tensor b({2});
  CHECK_THROWS_AS(kernels::conv1d_forward(x, w_even, b, 1, false), Error);  // even non-causal
  Tensor w_badch({2, 3, 1});
  CHECK_THROWS_AS(kernels::conv1d_forward(x, w_badch, b, 1, true), Error);
  Tensor w({2, 2, 3});
  CHECK_THROWS_AS(kernels::conv1d_forward(x, w, b, 0, true), Error);
}

TEST_CASE("deconv2 scatter semantics") {
  Tensor x({1, 2});
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 2.0;
  Tensor w({1, 1, 2});
  w.at(0, 0, 0) = 1.0;
  w.at(0, 0, 1) = 1.0;
  Tensor y = kernels::deconv2_forward(x, w);
  REQUIRE(y.extent(1) == 4);
  CHECK(y.at(0, 0) == 1.0);
  CHECK(y.at(0, 1) == 1.0);
  CHECK(y.at(0, 2) == 2.0);
  CHECK(y.at(0, 3) == 2.0);
}

TEST_CASE("deconv2 zero input gives zero output") {
  Tensor x({3, 5});
  Tensor w = Tensor::gaussian({3, 4, 2}, 1.0, 41);
  Tensor y = kernels::deconv2_forward(x, w);
  CHECK(y.min() == 0.0);
  CHECK(y.max() == 0.0);
}

TEST_CASE("deconv2 matches scatter-loop oracle on random input") {
  Tensor x = Tensor::gaussian({3, 6}, 1.0, 51);
  Tensor w = Tensor::gaussian({3, 2, 2}, 0.8, 52);
  Tensor y = kernels::deconv2_forward(x, w);
  Tensor o({2, 12});
  for (int ci = 0; ci < 3; ++ci)
    for (int i = 0; i < 6; ++i)
      for (int co = 0; co < 2; ++co)
        for (int j = 0; j < 2; ++j) o.at(co, 2 * i + j) += x.at(ci, i) * w.at(ci, co, j);
  CHECK(max_abs_diff(y, o) < 1e-12);
}

TEST_CASE("omp kernels are bit-identical to the serial reference") {
  Tensor x = Tensor::gaussian({48, 160}, 1.0, 61);
  Tensor w = Tensor::gaussian({96, 48, 3}, 0.1, 62);
  Tensor b = Tensor::gaussian({96}, 0.1, 63);
  for (bool causal : {true, false}) {
    Tensor yo = kernels::conv1d_forward(x, w, b, 3, causal);
    Tensor ys = ref::conv1d_forward(x, w, b, 3, causal);
    CHECK(bitwise_equal(yo, ys));
    Tensor dy = Tensor::gaussian({96, 160}, 1.0, 64);
    CHECK(bitwise_equal(kernels::conv1d_backward_input(dy, w, 3, causal),
                        ref::conv1d_backward_input(dy, w, 3, causal)));
    CHECK(bitwise_equal(kernels::conv1d_backward_weight(dy, x, 3, 3, causal),
                        ref::conv1d_backward_weight(dy, x, 3, 3, causal)));
    CHECK(bitwise_equal(kernels::conv1d_backward_bias(dy), ref::conv1d_backward_bias(dy)));
  }

  Tensor wd = Tensor::gaussian({48, 32, 2}, 0.2, 65);
  Tensor yd = kernels::deconv2_forward(x, wd);
  CHECK(bitwise_equal(yd, ref::deconv2_forward(x, wd)));
  Tensor dyd = Tensor::gaussian({32, 320}, 1.0, 66);
  CHECK(bitwise_equal(kernels::deconv2_backward_input(dyd, wd),
                      ref::deconv2_backward_input(dyd, wd)));
  CHECK(bitwise_equal(kernels::deconv2_backward_weight(dyd, x),
                      ref::deconv2_backward_weight(dyd, x)));

  Tensor a = Tensor::gaussian({37, 53}, 1.0, 67);
  Tensor m = Tensor::gaussian({37, 29}, 1.0, 68);
  CHECK(bitwise_equal(kernels::matmul(a, m, true, false), ref::matmul(a, m, true, false)));
  Tensor n = Tensor::gaussian({29, 53}, 1.0, 69);
  CHECK(bitwise_equal(kernels::matmul(n, a, false, true), ref::matmul(n, a, false, true)));
}

TEST_CASE("matmul against hand-rolled loop") {
  Tensor a = Tensor::gaussian({4, 6}, 1.0, 71);
  Tensor b = Tensor::gaussian({6, 5}, 1.0, 72);
  Tensor c = kernels::matmul(a, b, false, false);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) {
      real acc = 0.0;
      for (int l = 0; l < 6; ++l) acc += a.at(i, l) * b.at(l, j);
      CHECK(std::fabs(c.at(i, j) - acc) < 1e-12);
    }
  CHECK_THROWS_AS(kernels::matmul(a, Tensor({5, 5}), false, false), Error);
}

TEST_CASE("causality: future perturbation leaves past output unchanged") {
  Tensor x = Tensor::gaussian({3, 40}, 1.0, 81);
  Tensor w = Tensor::gaussian({3, 3, 3}, 0.5, 82);
  Tensor b = Tensor::gaussian({3}, 0.5, 83);
  // stack two causal convs with different dilations
  Tensor y1 = kernels::conv1d_forward(kernels::conv1d_forward(x, w, b, 1, true), w, b, 9, true);
  Tensor xp = x;
  for (int c = 0; c < 3; ++c)
    for (int t = 21; t < 40; ++t) xp.at(c, t) += 10.0 + c + t;
  Tensor y2 = kernels::conv1d_forward(kernels::conv1d_forward(xp, w, b, 1, true), w, b, 9, true);
  for (int c = 0; c < 3; ++c)
    for (int t = 0; t <= 20; ++t) CHECK(std::fabs(y1.at(c, t) - y2.at(c, t)) < 1e-12);
}
