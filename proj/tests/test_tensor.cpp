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

#include "emtts/tensor.hpp"

using namespace emtts;

TEST_CASE("gaussian init is reproducible for a fixed seed") {
  Tensor a = Tensor::gaussian({2, 2}, 1.0, 7);
  Tensor b = Tensor::gaussian({2, 2}, 1.0, 7);
  REQUIRE(a.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(a.data()[i] == b.data()[i]);

  Tensor c = Tensor::gaussian({2, 2}, 1.0, 8);
  bool any_diff = false;
  for (int i = 0; i < 4; ++i) any_diff = any_diff || a.data()[i] != c.data()[i];
  CHECK(any_diff);
}

TEST_CASE("gaussian init sample statistics") {
  Tensor t = Tensor::gaussian({10000}, 0.1, 123);
  real mean = t.sum() / 10000.0;
  real var = 0.0;
  for (real v : t.vec()) var += (v - mean) * (v - mean);
  var /= 10000.0;
  const real sd = std::sqrt(var);
  CHECK(std::fabs(mean) < 0.01);
  CHECK(sd >= 0.09);
  CHECK(sd <= 0.11);
}

TEST_CASE("gaussian init rejects stddev 0 and zero extents") {
  CHECK_THROWS_AS(Tensor::gaussian({3}, 0.0, 1), Error);
  CHECK_THROWS_AS(Tensor({0, 2}), Error);
  CHECK_THROWS_AS(Tensor(std::vector<int>{}), Error);
}

TEST_CASE("row-major indexing") {
  Tensor t({2, 3});
  t.at(1, 2) = 5.0;
  CHECK(t.data()[5] == 5.0);
  Tensor u({2, 3, 4});
  u.at(1, 2, 3) = 7.0;
  CHECK(u.data()[1 * 12 + 2 * 4 + 3] == 7.0);
}

TEST_CASE("finite check") {
  Tensor t({3});
  CHECK(t.all_finite());
  t.at(1) = std::nan("");
  CHECK(!t.all_finite());
}

TEST_CASE("uniform stream bounds and determinism") {
  UniformStream a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    int64_t x = a.next_int(3, 7);
    CHECK(x >= 3);
    CHECK(x <= 7);
    CHECK(x == b.next_int(3, 7));
  }
}
