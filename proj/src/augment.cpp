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

#include "emtts/augment.hpp"

#include <cmath>

namespace emtts {

namespace {

// Linear interpolation of row `r` of s at fractional column position p.
inline real sample_row(const Tensor& s, int r, real p, int cols) {
  const int k = static_cast<int>(std::floor(p));
  if (k >= cols - 1) return s.at(r, cols - 1);
  if (k < 0) return s.at(r, 0);
  const real frac = p - static_cast<real>(k);
  return s.at(r, k) + frac * (s.at(r, k + 1) - s.at(r, k));
}

}  // namespace

Tensor apply_time_warp(const Tensor& s, int anchor, int w) {
  EMTTS_CHECK(s.rank() == 2, "time warp: rank-2 spectrogram required");
  const int rows = s.extent(0), cols = s.extent(1);
  EMTTS_CHECK(cols >= 3, "time warp: need at least 3 frames");
  EMTTS_CHECK(anchor >= 1 && anchor <= cols - 2,
              "time warp: anchor " << anchor << " out of range for T=" << cols);
  const int a2 = anchor + w;
  EMTTS_CHECK(a2 >= 1 && a2 <= cols - 2,
              "time warp: displacement " << w << " pushes the anchor out of range");
  Tensor out({rows, cols});
  const real left_scale = static_cast<real>(anchor) / a2;
  const real right_scale =
      static_cast<real>(cols - 1 - anchor) / static_cast<real>(cols - 1 - a2);
  for (int t = 0; t < cols; ++t) {
    real src;
    if (t <= a2)
      src = static_cast<real>(t) * left_scale;
    else
      src = anchor + (static_cast<real>(t) - a2) * right_scale;
    for (int r = 0; r < rows; ++r) out.at(r, t) = sample_row(s, r, src, cols);
  }
  return out;
}

Tensor apply_freq_mask(const Tensor& s, int f0, int f) {
  EMTTS_CHECK(s.rank() == 2, "freq mask: rank-2 spectrogram required");
  EMTTS_CHECK(f >= 0 && f0 >= 0 && f0 + f <= s.extent(0),
              "freq mask [" << f0 << ", " << f0 + f << ") out of range for "
              << s.extent(0) << " bins");
  Tensor out = s;
  for (int r = f0; r < f0 + f; ++r)
    for (int c = 0; c < s.extent(1); ++c) out.at(r, c) = 0.0;
  return out;
}

Tensor apply_time_mask(const Tensor& s, int t0, int t) {
  EMTTS_CHECK(s.rank() == 2, "time mask: rank-2 spectrogram required");
  EMTTS_CHECK(t >= 0 && t0 >= 0 && t0 + t <= s.extent(1),
              "time mask [" << t0 << ", " << t0 + t << ") out of range for "
              << s.extent(1) << " frames");
  Tensor out = s;
  for (int r = 0; r < s.extent(0); ++r)
    for (int c = t0; c < t0 + t; ++c) out.at(r, c) = 0.0;
  return out;
}

Tensor spec_resize(const Tensor& s, real ratio, ResizeAxis axis) {
  EMTTS_CHECK(s.rank() == 2, "spec_resize: rank-2 spectrogram required");
  EMTTS_CHECK(ratio > 0, "spec_resize: ratio must be positive");
  const int rows = s.extent(0), cols = s.extent(1);
  const int extent = (axis == ResizeAxis::kFrequency) ? rows : cols;
  const int scaled = static_cast<int>(std::lround(extent * ratio));
  EMTTS_CHECK(scaled >= 1, "spec_resize: ratio " << ratio << " collapses the axis");
  if (scaled == extent && ratio == 1.0) return s;

  // Resample the chosen axis to `scaled` points (endpoints aligned), then
  // pad or cut at the high end.
  Tensor out({rows, cols});
  const real step = scaled > 1 ? static_cast<real>(extent - 1) / (scaled - 1) : 0.0;
  if (axis == ResizeAxis::kTime) {
    for (int t = 0; t < cols; ++t) {
      if (t >= scaled) break;  // remaining columns stay zero (pad)
      const real p = t * step;
      for (int r = 0; r < rows; ++r) out.at(r, t) = sample_row(s, r, p, cols);
    }
  } else {
    for (int r = 0; r < rows; ++r) {
      if (r >= scaled) break;
      const real p = r * step;
      const int k = std::min(static_cast<int>(std::floor(p)), rows - 1);
      const int k1 = std::min(k + 1, rows - 1);
      const real frac = p - static_cast<real>(k);
      for (int c = 0; c < cols; ++c)
        out.at(r, c) = s.at(k, c) + frac * (s.at(k1, c) - s.at(k, c));
    }
  }
  return out;
}

Tensor augment_spectrogram(const Tensor& s, const AugmentPolicy& policy, uint64_t seed) {
  policy.validate(s.extent(0));
  UniformStream us(seed);
  Tensor out = s;
  const int cols = s.extent(1), rows = s.extent(0);
  if (policy.warp_w > 0 && cols > 2 * policy.warp_w && cols >= 3) {
    const int anchor = static_cast<int>(us.next_int(policy.warp_w, cols - policy.warp_w));
    const int w = static_cast<int>(us.next_int(-policy.warp_w, policy.warp_w));
    const int a2 = anchor + w;
    if (anchor >= 1 && anchor <= cols - 2 && a2 >= 1 && a2 <= cols - 2)
      out = apply_time_warp(out, anchor, w);
  }
  for (int i = 0; i < policy.n_freq_masks; ++i) {
    const int f = static_cast<int>(us.next_int(0, policy.mask_f));
    const int f0 = static_cast<int>(us.next_int(0, rows - f));
    out = apply_freq_mask(out, f0, f);
  }
  for (int i = 0; i < policy.n_time_masks; ++i) {
    const int t = static_cast<int>(us.next_int(0, std::min(policy.mask_t, cols)));
    const int t0 = static_cast<int>(us.next_int(0, cols - t));
    out = apply_time_mask(out, t0, t);
  }
  if (!policy.resize_ratios.empty()) {
    const auto idx = us.next_int(0, static_cast<int64_t>(policy.resize_ratios.size()) - 1);
    const ResizeAxis axis = us.next_int(0, 1) == 0 ? ResizeAxis::kFrequency : ResizeAxis::kTime;
    out = spec_resize(out, policy.resize_ratios[static_cast<size_t>(idx)], axis);
  }
  return out;
}

}  // namespace emtts
