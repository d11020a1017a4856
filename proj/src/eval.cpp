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

#include "emtts/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emtts/kernels.hpp"

namespace emtts {

namespace {

constexpr int kNumCepstra = 13;

std::vector<real> matrix_col(const Tensor& m, int c) {
  std::vector<real> v(static_cast<size_t>(m.extent(0)));
  for (int r = 0; r < m.extent(0); ++r) v[static_cast<size_t>(r)] = m.at(r, c);
  return v;
}

real euclid(const std::vector<real>& a, const std::vector<real>& b) {
  real acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const real d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

struct Pearson {
  bool defined;
  real value;
};

Pearson pearson(const std::vector<real>& a, const std::vector<real>& b) {
  const size_t n = a.size();
  real ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<real>(n);
  mb /= static_cast<real>(n);
  real sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return {false, 0.0};
  return {true, sab / (std::sqrt(saa) * std::sqrt(sbb))};
}

}  // namespace

std::vector<std::pair<int, int>> dtw_align(const std::vector<std::vector<real>>& cost) {
  const int n = static_cast<int>(cost.size());
  EMTTS_CHECK(n > 0 && !cost[0].empty(), "dtw_align: empty cost matrix");
  const int m = static_cast<int>(cost[0].size());
  constexpr real kInf = std::numeric_limits<real>::infinity();
  std::vector<std::vector<real>> acc(n, std::vector<real>(m, kInf));
  std::vector<std::vector<unsigned char>> from(n, std::vector<unsigned char>(m, 0));
  acc[0][0] = cost[0][0];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == 0 && j == 0) continue;
      real best = kInf;
      unsigned char dir = 0;  // 0 diag, 1 up, 2 left
      if (i > 0 && j > 0 && acc[i - 1][j - 1] <= best) {
        best = acc[i - 1][j - 1];
        dir = 0;
      }
      if (i > 0 && acc[i - 1][j] < best) {
        best = acc[i - 1][j];
        dir = 1;
      }
      if (j > 0 && acc[i][j - 1] < best) {
        best = acc[i][j - 1];
        dir = 2;
      }
      acc[i][j] = best + cost[i][j];
      from[i][j] = dir;
    }
  std::vector<std::pair<int, int>> path;
  int i = n - 1, j = m - 1;
  path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    const unsigned char dir = from[i][j];
    if (i > 0 && j > 0 && dir == 0) {
      --i;
      --j;
    } else if (i > 0 && dir == 1) {
      --i;
    } else {
      --j;
    }
    path.emplace_back(i, j);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::vector<real>> mel_cepstra(const Waveform& w) {
  EMTTS_CHECK(!w.samples.empty(), "mel_cepstra: empty signal");
  DspConfig cfg;  // analysis constants shared with the main front end
  Tensor mag = stft_magnitude(w.samples, cfg);
  Tensor mel = kernels::matmul(mel_filterbank(cfg.n_mels, cfg.n_fft, kSampleRate), mag,
                               false, false);
  const int frames = mel.extent(1);
  const int nm = cfg.n_mels;
  std::vector<std::vector<real>> ceps(static_cast<size_t>(frames),
                                      std::vector<real>(kNumCepstra, 0.0));
  const real scale = std::sqrt(2.0 / nm);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < frames; ++t) {
    std::vector<real> logmel(static_cast<size_t>(nm));
    for (int f = 0; f < nm; ++f) logmel[static_cast<size_t>(f)] = std::log(std::max(mel.at(f, t), 1e-5));
    for (int d = 1; d <= kNumCepstra; ++d) {
      real acc = 0.0;
      for (int f = 0; f < nm; ++f)
        acc += logmel[static_cast<size_t>(f)] * std::cos(M_PI * d * (f + 0.5) / nm);
      ceps[static_cast<size_t>(t)][static_cast<size_t>(d - 1)] = scale * acc;
    }
  }
  return ceps;
}

real mcd(const Waveform& ref, const Waveform& syn) {
  const auto cr = mel_cepstra(ref);
  const auto cs = mel_cepstra(syn);
  std::vector<std::vector<real>> cost(cr.size(), std::vector<real>(cs.size()));
  for (size_t i = 0; i < cr.size(); ++i)
    for (size_t j = 0; j < cs.size(); ++j) cost[i][j] = euclid(cr[i], cs[j]);
  const auto path = dtw_align(cost);
  real acc = 0.0;
  for (const auto& [i, j] : path) acc += cost[static_cast<size_t>(i)][static_cast<size_t>(j)];
  const real mean = acc / static_cast<real>(path.size());
  return 10.0 / std::log(10.0) * std::sqrt(2.0) * mean;
}

F0Track extract_f0(const Waveform& w) {
  EMTTS_CHECK(!w.samples.empty(), "extract_f0: empty signal");
  const int fs = kSampleRate;
  const int hop = fs * 5 / 1000;      // 110 samples
  const int win = fs * 25 / 1000;     // 551 samples
  const int lag_min = (fs + 399) / 400;  // ceil -> 56
  const int lag_max = fs / 70;           // floor -> 315
  const int64_t n = static_cast<int64_t>(w.samples.size());
  F0Track track;
  if (n < win) return track;
  const int frames = static_cast<int>((n - win) / hop) + 1;
  track.f0.assign(static_cast<size_t>(frames), 0.0);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < frames; ++t) {
    const real* x = w.samples.data() + static_cast<int64_t>(t) * hop;
    real mean = 0.0;
    for (int i = 0; i < win; ++i) mean += x[i];
    mean /= win;
    real best_r = 0.0;
    int best_lag = 0;
    for (int lag = lag_min; lag <= lag_max; ++lag) {
      const int m = win - lag;
      real num = 0.0, e0 = 0.0, e1 = 0.0;
      for (int i = 0; i < m; ++i) {
        const real a = x[i] - mean;
        const real b = x[i + lag] - mean;
        num += a * b;
        e0 += a * a;
        e1 += b * b;
      }
      if (e0 <= 1e-12 || e1 <= 1e-12) continue;
      const real r = num / std::sqrt(e0 * e1);
      if (r > best_r) {
        best_r = r;
        best_lag = lag;
      }
    }
    if (best_lag > 0 && best_r >= 0.3)
      track.f0[static_cast<size_t>(t)] = static_cast<real>(fs) / best_lag;
  }
  return track;
}

PccResult f0_pcc(const Waveform& ref, const Waveform& syn) {
  const F0Track tr = extract_f0(ref);
  const F0Track ts = extract_f0(syn);
  std::vector<real> lr, ls;
  for (real f : tr.f0)
    if (f > 0) lr.push_back(std::log(f));
  for (real f : ts.f0)
    if (f > 0) ls.push_back(std::log(f));
  PccResult out;
  if (lr.size() < 2 || ls.size() < 2) return out;

  // Align on mean-centered log-F0 so constant offsets keep the identity path.
  real mr = 0.0, ms = 0.0;
  for (real v : lr) mr += v;
  mr /= static_cast<real>(lr.size());
  for (real v : ls) ms += v;
  ms /= static_cast<real>(ls.size());
  std::vector<std::vector<real>> cost(lr.size(), std::vector<real>(ls.size()));
  for (size_t i = 0; i < lr.size(); ++i)
    for (size_t j = 0; j < ls.size(); ++j)
      cost[i][j] = std::fabs((lr[i] - mr) - (ls[j] - ms));
  const auto path = dtw_align(cost);
  std::vector<real> a, b;
  a.reserve(path.size());
  b.reserve(path.size());
  for (const auto& [i, j] : path) {
    a.push_back(lr[static_cast<size_t>(i)]);
    b.push_back(ls[static_cast<size_t>(j)]);
  }
  out.frames_aligned = static_cast<int>(path.size());
  if (path.size() < 10) return out;
  const Pearson p = pearson(a, b);
  out.defined = p.defined;
  out.value = p.value;
  return out;
}

real attention_diagonality(const Tensor& attention, real g) {
  EMTTS_CHECK(attention.rank() == 2, "attention_diagonality: rank-2 matrix required");
  const int n = attention.extent(0), t_cols = attention.extent(1);
  real acc = 0.0;
  for (int t = 0; t < t_cols; ++t) {
    int arg = 0;
    for (int i = 1; i < n; ++i)
      if (attention.at(i, t) > attention.at(arg, t)) arg = i;  // ties keep lowest
    const real d = static_cast<real>(arg) / n - static_cast<real>(t) / t_cols;
    acc += std::exp(-(d * d) / (2.0 * g * g));
  }
  return acc / static_cast<real>(t_cols);
}

}  // namespace emtts
