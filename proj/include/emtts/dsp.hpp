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

#ifndef EMTTS_DSP_HPP_
#define EMTTS_DSP_HPP_

#include <complex>
#include <string>
#include <vector>

#include "emtts/tensor.hpp"

namespace emtts {

constexpr int kSampleRate = 22050;

struct Waveform {
  std::vector<real> samples;  // in [-1, 1]
  int sample_rate = kSampleRate;
};

struct DspConfig {
  int n_fft = 1024;
  int hop = 256;
  int win = 1024;  // Hann, periodic; must equal n_fft
  int n_mels = 80;
  int reduction = 4;  // coarse-mel time decimation factor
  real ref_db = 20.0;
  real max_db = 100.0;
  real preemphasis = 0.97;
  int gl_iterations = 60;
  real sharpening_power = 1.3;
  bool ssrn_output_mel = false;  // SSRN emits n_mels bins instead of linear bins

  int full_bins() const { return n_fft / 2 + 1; }
  int ssrn_out_bins() const { return ssrn_output_mel ? n_mels : full_bins(); }
  void validate() const;
};

// Both spectrograms normalized to [0,1]; the linear full-rate frame count is
// padded up to a multiple of cfg.reduction, and the coarse mel holds every
// reduction-th frame of the full-rate mel (so coarse cols = full cols / 4).
struct SpectrogramPair {
  Tensor mel_coarse;   // n_mels x T'
  Tensor linear_full;  // full_bins x 4T'
};

// 16-bit PCM WAV in; mono or first channel; resampled to 22050 Hz when
// needed (a note is appended to `warnings`). Structured errors name the
// offending header field.
Waveform load_wav(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_wav(const std::string& path, const Waveform& w);

std::vector<real> resample_linear(const std::vector<real>& x, int src_rate, int dst_rate);

// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<real>>& a, bool inverse);

// Magnitude STFT (full_bins x frames) of a pre-emphasized signal is taken
// internally by spectrogram_pair; these pieces are exposed for reuse and
// for alignment cross-checks in train.
Tensor stft_magnitude(const std::vector<real>& samples, const DspConfig& cfg);

Tensor mel_filterbank(int n_mels, int n_fft, int sample_rate);
// clip((20*log10(max(x,1e-5)) - ref_db + max_db) / max_db, 0, 1), elementwise.
Tensor normalize_db(const Tensor& mag, const DspConfig& cfg);
// Inverse of normalize_db on the representable range.
Tensor denormalize_db(const Tensor& norm, const DspConfig& cfg);
// Every `reduction`-th column starting at 0.
Tensor decimate_time(const Tensor& spec, int reduction);
// Full-rate normalized mel (n_mels x 4T'), the undecimated counterpart of
// mel_coarse; used by crop alignment checks.
Tensor mel_full_rate(const Waveform& w, const DspConfig& cfg);

SpectrogramPair spectrogram_pair(const Waveform& w, const DspConfig& cfg);

// Phase reconstruction from a normalized linear spectrogram: denormalize,
// sharpen, gl_iterations of alternating STFT-consistency projections from
// zero phase, de-emphasis, peak normalization to 0.95 (skipped on
// silence). Output has exactly cols * hop samples. When given,
// `consistency_trace` receives || |STFT(x_i)| - target ||_F per iteration.
Waveform griffin_lim(const Tensor& linear_norm, const DspConfig& cfg,
                     std::vector<real>* consistency_trace = nullptr);

// Consistency distance ||(|STFT(x)| - target)||_F used by the Griffin-Lim
// monotonicity property.
real gl_consistency_error(const std::vector<real>& x, const Tensor& target_mag,
                          const DspConfig& cfg);

// "EMSP" spectrogram cache: magic, u32 version, u32 rows, u32 cols,
// u32 dtype (0 = f32), then row-major 32-bit little-endian values.
void save_spec(const std::string& path, const Tensor& spec);
Tensor load_spec(const std::string& path);
bool spec_header_ok(const std::string& path);

// 8-bit binary PGM of a [0,1] matrix (used for attention snapshots).
void write_pgm(const std::string& path, const Tensor& a);

}  // namespace emtts

#endif  // EMTTS_DSP_HPP_
