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

#include "emtts/gradcheck.hpp"
#include "emtts/kernels.hpp"
#include "emtts/nn.hpp"
#include "emtts/tape.hpp"

using namespace emtts;

TEST_CASE("backward of sum gives all-ones gradient") {
  Parameter p("x", Tensor::gaussian({3, 4}, 1.0, 1));
  Tape t;
  Var x = t.param(p);
  t.backward(ops::sum_all(t, x));
  for (int64_t i = 0; i < p.grad.size(); ++i) CHECK(p.grad.data()[i] == 1.0);
}

TEST_CASE("backward of quadratic gives the input back") {
  Parameter p("x", Tensor::gaussian({7}, 1.0, 2));
  Tape t;
  Var x = t.param(p);
  Var loss = ops::scale(t, ops::sum_all(t, ops::mul(t, x, x)), 0.5);
  t.backward(loss);
  for (int64_t i = 0; i < 7; ++i)
    CHECK(std::fabs(p.grad.data()[i] - p.value.data()[i]) < 1e-12);
}

TEST_CASE("repeated backward accumulates until reset") {
  Parameter p("x", Tensor::full({2}, 3.0));
  {
    Tape t;
    Var loss = ops::sum_all(t, t.param(p));
    t.backward(loss);
  }
  {
    Tape t;
    Var loss = ops::sum_all(t, t.param(p));
    t.backward(loss);
  }
  CHECK(p.grad.at(0) == 2.0);
  ModelParams mp;
  mp.create("y", Tensor::full({1}, 1.0));
  mp.zero_grad();
  CHECK(mp.get("y").grad.at(0) == 0.0);
}

TEST_CASE("backward rejects non-scalar loss") {
  Tape t;
  Var x = t.leaf(Tensor::full({3}, 1.0), true);
  CHECK_THROWS_AS(t.backward(x), Error);
}

TEST_CASE("softmax columns: uniform, exact exponentials, stability") {
  Tape t;
  Tensor m({3, 3});
  // col 0: zeros; col 1: ln1, ln2, ln3; col 2: 1000, 0, 0
  m.at(0, 1) = std::log(1.0);
  m.at(1, 1) = std::log(2.0);
  m.at(2, 1) = std::log(3.0);
  m.at(0, 2) = 1000.0;
  Var y = ops::softmax_columns(t, t.constant(m));
  const Tensor& v = t.val(y);
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(v.at(i, 0) - 1.0 / 3.0) < 1e-12);
  CHECK(std::fabs(v.at(0, 1) - 1.0 / 6.0) < 1e-12);
  CHECK(std::fabs(v.at(1, 1) - 2.0 / 6.0) < 1e-12);
  CHECK(std::fabs(v.at(2, 1) - 3.0 / 6.0) < 1e-12);
  CHECK(v.at(0, 2) > 1.0 - 1e-12);
  CHECK(v.all_finite());
  for (int j = 0; j < 3; ++j) {
    real s = 0.0;
    for (int i = 0; i < 3; ++i) {
      CHECK(v.at(i, j) >= 0.0);
      CHECK(v.at(i, j) <= 1.0);
      s += v.at(i, j);
    }
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("highway block: closed gate passes input, open gate passes candidate") {
  const int c = 3, t_len = 5;
  Tensor x = Tensor::gaussian({c, t_len}, 1.0, 3);
  Tensor w = Tensor::gaussian({2 * c, c, 3}, 0.4, 4);

  Tensor b_closed({2 * c});
  for (int i = 0; i < c; ++i) b_closed.at(i) = -1e6;
  {
    Tape t;
    Var out = ops::highway_conv(t, t.constant(x), t.constant(w), t.constant(b_closed), 1, false);
    for (int64_t i = 0; i < x.size(); ++i)
      CHECK(std::fabs(t.val(out).data()[i] - x.data()[i]) < 1e-12);
  }

  Tensor b_open({2 * c});
  for (int i = 0; i < c; ++i) b_open.at(i) = 1e6;
  {
    Tape t;
    Var out = ops::highway_conv(t, t.constant(x), t.constant(w), t.constant(b_open), 1, false);
    Tensor h = kernels::conv1d_forward(x, w, b_open, 1, false);
    for (int ch = 0; ch < c; ++ch)
      for (int i = 0; i < t_len; ++i)
        CHECK(std::fabs(t.val(out).at(ch, i) - h.at(c + ch, i)) < 1e-12);
  }
}

TEST_CASE("highway block matches a composition oracle on seeded input") {
  const int c = 4, t_len = 9;
  Tensor x = Tensor::gaussian({c, t_len}, 1.0, 5);
  Tensor w = Tensor::gaussian({2 * c, c, 3}, 0.3, 6);
  Tensor b = Tensor::gaussian({2 * c}, 0.2, 7);
  Tape t;
  Var out = ops::highway_conv(t, t.constant(x), t.constant(w), t.constant(b), 2, true);

  Tensor h = kernels::conv1d_forward(x, w, b, 2, true);
  for (int ch = 0; ch < c; ++ch)
    for (int i = 0; i < t_len; ++i) {
      const real g = 1.0 / (1.0 + std::exp(-h.at(ch, i)));
      const real expect = g * h.at(c + ch, i) + (1.0 - g) * x.at(ch, i);
      CHECK(std::fabs(t.val(out).at(ch, i) - expect) < 1e-12);
    }
}

TEST_CASE("binary divergence value and saturation limits") {
  {
    Tape t;
    Tensor s = Tensor::full({2, 3}, 0.5);
    Var z = t.leaf(Tensor::zeros({2, 3}), true);
    Var loss = ops::binary_divergence_mean(t, z, s, nullptr, 6.0);
    CHECK(std::fabs(t.scalar(loss) - std::log(2.0)) < 1e-12);
  }
  {
    Tape t;
    Tensor s = Tensor::full({1}, 1.0);
    Var loss = ops::binary_divergence_mean(t, t.leaf(Tensor::full({1}, 40.0), true), s,
                                           nullptr, 1.0);
    CHECK(t.scalar(loss) < 1e-12);
    Var loss2 = ops::binary_divergence_mean(t, t.leaf(Tensor::full({1}, -40.0), true), s,
                                            nullptr, 1.0);
    CHECK(std::fabs(t.scalar(loss2) - 40.0) < 1e-12);
  }
  {
    Tape t;
    Tensor bad = Tensor::full({1}, 1.5);
    CHECK_THROWS_AS(
        ops::binary_divergence_mean(t, t.leaf(Tensor::zeros({1}), true), bad, nullptr, 1.0),
        Error);
  }
}

TEST_CASE("binary divergence gradient equals sigmoid(z) - s") {
  Tensor z = Tensor::gaussian({4, 5}, 2.0, 8);
  Tensor s = Tensor::gaussian({4, 5}, 0.1, 9);
  for (auto& v : s.vec()) v = std::clamp(v + 0.5, 0.0, 1.0);
  Parameter p("z", z);
  Tape t;
  Var loss = ops::binary_divergence_mean(t, t.param(p), s, nullptr, 20.0);
  t.backward(loss);
  for (int64_t i = 0; i < z.size(); ++i) {
    const real sig = 1.0 / (1.0 + std::exp(-z.data()[i]));
    CHECK(std::fabs(p.grad.data()[i] - (sig - s.data()[i]) / 20.0) < 1e-8);
  }
}

TEST_CASE("detach stops gradient flow") {
  Parameter p("x", Tensor::full({3}, 2.0));
  Tape t;
  Var x = t.param(p);
  Var loss = ops::sum_all(t, ops::mul(t, ops::detach(t, x), x));
  t.backward(loss);
  // d/dx of detach(x)*x is detach(x) = 2, not 2x = 4
  for (int i = 0; i < 3; ++i) CHECK(p.grad.at(i) == 2.0);
}

TEST_CASE("grad_check on sum(sigmoid(Wx)) is tight") {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({3, 4}, 1.0, 10));
  Tensor x = Tensor::gaussian({4, 5}, 1.0, 11);
  auto f = [&](Tape& t, ParamBinder& bind) {
    Var w = bind(mp.get("w"));
    return ops::sum_all(t, ops::sigmoid(t, ops::matmul(t, w, t.constant(x))));
  };
  CHECK(grad_check(f, mp, 1e-5) < 1e-6);
}

TEST_CASE("grad_check flags a corrupted gradient rule") {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({4}, 1.0, 12));
  auto bad_sigmoid = [](Tape& t, Var a) {
    Tensor out = t.val(a);
    for (auto& v : out.vec()) v = 1.0 / (1.0 + std::exp(-v));
    return t.make(std::move(out), {a}, [a](Tape& g, int self) {
      Tensor da = g.node(Var{self}).grad;
      const real* y = g.node(Var{self}).value.data();
      // wrong rule: sigma instead of sigma * (1 - sigma)
      for (int64_t i = 0; i < da.size(); ++i) da.data()[i] *= y[i];
      g.accum_grad(a, da);
    });
  };
  auto f = [&](Tape& t, ParamBinder& bind) {
    return ops::sum_all(t, bad_sigmoid(t, bind(mp.get("w"))));
  };
  CHECK(grad_check(f, mp, 1e-5) > 1e-2);
}

TEST_CASE("grad_check on a constant function is ~0") {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({4}, 1.0, 13));
  auto f = [&](Tape& t, ParamBinder& bind) {
    Var w = bind(mp.get("w"));
    return ops::sum_all(t, ops::mul(t, w, t.constant(Tensor::zeros({4}))));
  };
  CHECK(grad_check(f, mp, 1e-5) < 1e-9);
}

TEST_CASE("conv ops through the tape match kernel gradients numerically") {
  ModelParams mp;
  mp.create("w", Tensor::gaussian({3, 2, 3}, 0.5, 14));
  mp.create("b", Tensor::gaussian({3}, 0.5, 15));
  mp.create("wd", Tensor::gaussian({3, 2, 2}, 0.5, 16));
  Tensor x = Tensor::gaussian({2, 11}, 1.0, 17);
  auto f = [&](Tape& t, ParamBinder& bind) {
    Var y = ops::conv1d(t, t.constant(x), bind(mp.get("w")), bind(mp.get("b")), 3, true);
    Var z = ops::conv1d_transpose(t, y, bind(mp.get("wd")));
    return ops::mean_all(t, ops::mul(t, z, z));
  };
  CHECK(grad_check(f, mp, 1e-5) < 1e-6);
}

TEST_CASE("forward pass is bit-identical for a fixed seed") {
  auto build = [](uint64_t seed) {
    ModelParams mp;
    std::vector<LayerDesc> stack = {
        conv_layer("conv1", 3, 8, 1, 1, false, Act::kRelu),
        highway_layer("hw1", 8, 3, 3, true),
        conv_layer("conv2", 8, 2, 1, 1, false, Act::kNone, false),
    };
    create_stack_params(mp, "net", stack, 0.02, seed);
    Tape t;
    ParamBinder bind(t);
    Var x = t.constant(Tensor::gaussian({3, 13}, 1.0, 99));
    Var y = run_stack(t, bind, mp, "net", stack, x);
    return t.val(y);
  };
  Tensor a = build(5), b = build(5);
  for (int64_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("conv1d_transpose rejects stride other than 2") {
  Tape t;
  Var x = t.constant(Tensor::zeros({1, 4}));
  Var w = t.constant(Tensor::zeros({1, 1, 2}));
  CHECK_THROWS_AS(ops::conv1d_transpose(t, x, w, 3), Error);
}
