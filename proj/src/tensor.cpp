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

#include "emtts/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace emtts {

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  EMTTS_CHECK(!shape_.empty() && shape_.size() <= 3,
              "tensor rank must be 1..3, got " << shape_.size());
  int64_t n = 1;
  for (int e : shape_) {
    EMTTS_CHECK(e > 0, "tensor extents must be positive, got " << e);
    n *= e;
  }
  data_.assign(static_cast<size_t>(n), 0.0);
}

Tensor Tensor::full(std::vector<int> shape, real v) {
  Tensor t(std::move(shape));
  t.fill(v);
  return t;
}

Tensor Tensor::gaussian(std::vector<int> shape, real stddev, uint64_t seed) {
  EMTTS_CHECK(stddev > 0.0, "gaussian init requires stddev > 0, got " << stddev);
  Tensor t(std::move(shape));
  GaussianStream g(seed);
  for (auto& v : t.vec()) v = g.next(stddev);
  return t;
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](real v) { return std::isfinite(v); });
}

void Tensor::fill(real v) { std::fill(data_.begin(), data_.end(), v); }

real Tensor::min() const {
  return *std::min_element(data_.begin(), data_.end());
}

real Tensor::max() const {
  return *std::max_element(data_.begin(), data_.end());
}

real Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

std::string Tensor::shape_str() const {
  std::string s = "[";
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape_[i]);
  }
  return s + "]";
}

uint64_t GaussianStream::next_u64() { return state_ = splitmix64(state_); }

real GaussianStream::uniform01() {
  // 53-bit mantissa in (0, 1]; never 0 so log() below is safe.
  return (static_cast<real>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

real GaussianStream::next(real stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return spare_ * stddev;
  }
  real u = uniform01();
  real v = uniform01();
  real r = std::sqrt(-2.0 * std::log(u));
  real a = 2.0 * M_PI * v;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a) * stddev;
}

int64_t UniformStream::next_int(int64_t lo, int64_t hi) {
  EMTTS_CHECK(lo <= hi, "next_int: empty range [" << lo << ", " << hi << "]");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  // Rejection sampling keeps the draw exactly uniform.
  uint64_t limit = std::numeric_limits<uint64_t>::max() - std::numeric_limits<uint64_t>::max() % span;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<int64_t>(x % span);
}

real UniformStream::next_real01() { return static_cast<real>(next_u64() >> 11) * 0x1.0p-53; }

real UniformStream::next_real(real lo, real hi) { return lo + (hi - lo) * next_real01(); }

}  // namespace emtts
