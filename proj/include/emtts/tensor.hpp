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

#ifndef EMTTS_TENSOR_HPP_
#define EMTTS_TENSOR_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "emtts/common.hpp"

namespace emtts {

// Dense row-major real tensor of rank 1..3. The universal numeric carrier
// for spectrograms, attention matrices and network parameters.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, real v);
  // Values drawn i.i.d. normal(0, stddev^2) via Box-Muller over a seeded
  // mt19937_64 stream; same seed gives a bit-identical tensor on every
  // platform. stddev must be > 0.
  static Tensor gaussian(std::vector<int> shape, real stddev, uint64_t seed);

  int rank() const { return static_cast<int>(shape_.size()); }
  int extent(int axis) const { return shape_[axis]; }
  const std::vector<int>& shape() const { return shape_; }
  int64_t size() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }
  std::vector<real>& vec() { return data_; }
  const std::vector<real>& vec() const { return data_; }

  real& at(int i) { return data_[i]; }
  real at(int i) const { return data_[i]; }
  real& at(int i, int j) { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  real at(int i, int j) const { return data_[static_cast<size_t>(i) * shape_[1] + j]; }
  real& at(int i, int j, int k) {
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }
  real at(int i, int j, int k) const {
    return data_[(static_cast<size_t>(i) * shape_[1] + j) * shape_[2] + k];
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  void fill(real v);

  real min() const;
  real max() const;
  real sum() const;

  std::string shape_str() const;

 private:
  std::vector<int> shape_;
  std::vector<real> data_;
};

// Standard normal deviates from a seeded stream, one value per call.
// Box-Muller over 53-bit uniforms; deterministic across platforms.
class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : state_(splitmix64(seed ^ 0x5d61c7a4b6e4203bull)) {}
  real next(real stddev = 1.0);

 private:
  real uniform01();  // in (0, 1]
  uint64_t next_u64();
  uint64_t state_;
  bool have_spare_ = false;
  real spare_ = 0.0;
};

// Uniform helpers over splitmix64, deterministic across platforms.
class UniformStream {
 public:
  explicit UniformStream(uint64_t seed) : state_(splitmix64(seed ^ 0x243f6a8885a308d3ull)) {}
  uint64_t next_u64() { return state_ = splitmix64(state_); }
  // Uniform integer in [lo, hi] inclusive.
  int64_t next_int(int64_t lo, int64_t hi);
  real next_real01();  // in [0, 1)
  real next_real(real lo, real hi);

 private:
  uint64_t state_;
};

}  // namespace emtts

#endif  // EMTTS_TENSOR_HPP_
