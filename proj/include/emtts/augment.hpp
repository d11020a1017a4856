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

#ifndef EMTTS_AUGMENT_HPP_
#define EMTTS_AUGMENT_HPP_

#include <vector>

#include "emtts/tensor.hpp"

namespace emtts {

struct AugmentPolicy {
  int warp_w = 5;        // max time-warp displacement, frames
  int mask_f = 15;       // max frequency-mask width, bins
  int mask_t = 20;       // max time-mask width, frames
  int n_freq_masks = 1;
  int n_time_masks = 1;
  std::vector<real> resize_ratios = {0.85, 0.95, 1.05, 1.15};
  int expansion_factor = 6;

  void validate(int n_bins) const {
    EMTTS_CHECK(warp_w >= 0 && mask_f >= 0 && mask_t >= 0, "mask widths must be >= 0");
    EMTTS_CHECK(mask_f < n_bins, "mask_f must be below the bin count");
    EMTTS_CHECK(n_freq_masks >= 0 && n_time_masks >= 0, "mask counts must be >= 0");
    EMTTS_CHECK(expansion_factor >= 1, "expansion_factor must be >= 1");
    for (real r : resize_ratios) EMTTS_CHECK(r > 0, "resize ratios must be positive");
  }
};

enum class ResizeAxis { kFrequency, kTime };

// Piecewise-linear time remap: [0, anchor] -> [0, anchor+w] and
// [anchor, T-1] -> [anchor+w, T-1], resampled row-wise with linear
// interpolation; endpoints fixed, w = 0 is an exact identity.
Tensor apply_time_warp(const Tensor& s, int anchor, int w);

// Rows [f0, f0+f) zeroed; everything else bit-identical.
Tensor apply_freq_mask(const Tensor& s, int f0, int f);
// Columns [t0, t0+t) zeroed.
Tensor apply_time_mask(const Tensor& s, int t0, int t);

// Rescales one axis to round(extent*ratio) by 1-D linear interpolation,
// then zero-pads or cuts at the high end back to the original shape.
Tensor spec_resize(const Tensor& s, real ratio, ResizeAxis axis);

// One random draw of the full pipeline (warp, masks, resize) with bounds
// from the policy; deterministic in `seed`.
Tensor augment_spectrogram(const Tensor& s, const AugmentPolicy& policy, uint64_t seed);

}  // namespace emtts

#endif  // EMTTS_AUGMENT_HPP_
