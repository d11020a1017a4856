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

#include "emtts/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "emtts/kernels.hpp"

namespace emtts {

namespace {

constexpr real kMagFloor = 1e-5;

std::vector<real> hann_periodic(int n) {
  std::vector<real> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
  return w;
}

// Reflected index for center-padded framing.
inline int64_t reflect_index(int64_t i, int64_t n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

std::vector<real> apply_preemphasis(const std::vector<real>& x, real coef) {
  std::vector<real> y(x.size());
  if (x.empty()) return y;
  y[0] = x[0];
  for (size_t i = 1; i < x.size(); ++i) y[i] = x[i] - coef * x[i - 1];
  return y;
}

std::vector<real> apply_deemphasis(const std::vector<real>& x, real coef) {
  std::vector<real> y(x.size());
  real prev = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    prev = x[i] + coef * prev;
    y[i] = prev;
  }
  return y;
}

// Analysis scale: a full-scale sine maps to magnitude ~1 (0 dB), keeping
// normalized targets inside (0,1) instead of clipping at the top.
real stft_scale(const std::vector<real>& window) {
  real wsum = 0.0;
  for (real w : window) wsum += w;
  return 2.0 / wsum;
}

// Complex STFT of a signal, center-framed with reflect padding.
// Output: full_bins x frames, frames = 1 + len/hop.
std::vector<std::vector<std::complex<real>>> stft_complex(const std::vector<real>& x,
                                                          const DspConfig& cfg) {
  const int64_t len = static_cast<int64_t>(x.size());
  EMTTS_CHECK(len >= cfg.win, "waveform shorter than one analysis window ("
              << len << " < " << cfg.win << " samples)");
  const int frames = 1 + static_cast<int>(len / cfg.hop);
  const auto window = hann_periodic(cfg.win);
  const real scale = stft_scale(window);
  std::vector<std::vector<std::complex<real>>> spec(frames);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < frames; ++t) {
    std::vector<std::complex<real>> frame(cfg.n_fft);
    const int64_t start = static_cast<int64_t>(t) * cfg.hop - cfg.n_fft / 2;
    for (int i = 0; i < cfg.n_fft; ++i)
      frame[i] = x[reflect_index(start + i, len)] * window[i];
    fft_radix2(frame, false);
    frame.resize(cfg.full_bins());
    for (auto& v : frame) v *= scale;
    spec[t] = std::move(frame);
  }
  return spec;
}

// Inverse STFT via windowed overlap-add with squared-window normalization.
// Returns the center-trimmed signal of length out_len.
std::vector<real> istft(const std::vector<std::vector<std::complex<real>>>& spec,
                        const DspConfig& cfg, int64_t out_len) {
  const int frames = static_cast<int>(spec.size());
  const auto window = hann_periodic(cfg.win);
  const real inv_scale = 1.0 / stft_scale(window);
  const int64_t buf_len = static_cast<int64_t>(frames - 1) * cfg.hop + cfg.n_fft;
  std::vector<real> buf(buf_len, 0.0), wsum(buf_len, 0.0);
  std::vector<std::complex<real>> frame(cfg.n_fft);
  for (int t = 0; t < frames; ++t) {
    for (int i = 0; i < cfg.full_bins(); ++i) frame[i] = spec[t][i] * inv_scale;
    for (int i = cfg.full_bins(); i < cfg.n_fft; ++i)
      frame[i] = std::conj(spec[t][cfg.n_fft - i] * inv_scale);
    fft_radix2(frame, true);
    const int64_t off = static_cast<int64_t>(t) * cfg.hop;
    for (int i = 0; i < cfg.n_fft; ++i) {
      buf[off + i] += frame[i].real() * window[i];
      wsum[off + i] += window[i] * window[i];
    }
  }
  std::vector<real> y(out_len, 0.0);
  const int64_t lead = cfg.n_fft / 2;
  for (int64_t i = 0; i < out_len && lead + i < buf_len; ++i)
    y[i] = buf[lead + i] / std::max(wsum[lead + i], 1e-8);
  return y;
}

uint32_t read_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void write_u32(std::ostream& out, uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                              static_cast<unsigned char>((v >> 8) & 0xFF),
                              static_cast<unsigned char>((v >> 16) & 0xFF),
                              static_cast<unsigned char>((v >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

uint16_t read_u16(std::istream& in) {
  unsigned char b[2];
  in.read(reinterpret_cast<char*>(b), 2);
  return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

}  // namespace

void DspConfig::validate() const {
  EMTTS_CHECK(n_fft > 0 && (n_fft & (n_fft - 1)) == 0, "n_fft must be a power of two");
  EMTTS_CHECK(win == n_fft, "win must equal n_fft");
  EMTTS_CHECK(hop > 0 && hop <= n_fft, "hop must be in (0, n_fft]");
  EMTTS_CHECK(n_mels > 0 && reduction >= 1, "bad n_mels/reduction");
  EMTTS_CHECK(max_db > 0, "max_db must be positive");
  EMTTS_CHECK(gl_iterations >= 0, "gl_iterations must be >= 0");
}

void fft_radix2(std::vector<std::complex<real>>& a, bool inverse) {
  const size_t n = a.size();
  EMTTS_CHECK(n > 0 && (n & (n - 1)) == 0, "fft size must be a power of two, got " << n);
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const real ang = 2.0 * M_PI / static_cast<real>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<real> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<real> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const std::complex<real> u = a[i + j];
        const std::complex<real> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<real>(n);
}

Waveform load_wav(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  EMTTS_CHECK(in.good(), "cannot open WAV file: " << path);
  char riff[4];
  in.read(riff, 4);
  EMTTS_CHECK(std::memcmp(riff, "RIFF", 4) == 0, path << ": bad RIFF chunk id");
  read_u32(in);  // riff size
  char wave[4];
  in.read(wave, 4);
  EMTTS_CHECK(std::memcmp(wave, "WAVE", 4) == 0, path << ": bad WAVE form type");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  std::vector<int16_t> pcm;
  bool have_fmt = false, have_data = false;
  while (in.good() && !(have_fmt && have_data)) {
    char id[4];
    in.read(id, 4);
    if (!in.good()) break;
    const uint32_t sz = read_u32(in);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      format = read_u16(in);
      channels = read_u16(in);
      rate = read_u32(in);
      read_u32(in);  // byte rate
      read_u16(in);  // block align
      bits = read_u16(in);
      if (sz > 16) in.seekg(sz - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      EMTTS_CHECK(have_fmt, path << ": data chunk before fmt chunk");
      EMTTS_CHECK(format == 1, path << ": fmt.audio_format must be 1 (PCM), got " << format);
      EMTTS_CHECK(bits == 16, path << ": fmt.bits_per_sample must be 16, got " << bits);
      EMTTS_CHECK(channels >= 1, path << ": fmt.num_channels must be >= 1");
      pcm.resize(sz / 2);
      in.read(reinterpret_cast<char*>(pcm.data()), static_cast<std::streamsize>(sz / 2 * 2));
      EMTTS_CHECK(in.gcount() == static_cast<std::streamsize>(sz / 2 * 2),
                  path << ": data chunk truncated");
      have_data = true;
    } else {
      in.seekg(sz + (sz & 1), std::ios::cur);
    }
  }
  EMTTS_CHECK(have_fmt, path << ": missing fmt chunk");
  EMTTS_CHECK(have_data, path << ": missing data chunk");

  const size_t n = pcm.size() / channels;
  std::vector<real> samples(n);
  for (size_t i = 0; i < n; ++i)
    samples[i] = static_cast<real>(pcm[i * channels]) / 32768.0;

  Waveform w;
  if (rate != kSampleRate) {
    samples = resample_linear(samples, static_cast<int>(rate), kSampleRate);
    if (warnings)
      warnings->push_back(path + ": resampled from " + std::to_string(rate) + " Hz to " +
                          std::to_string(kSampleRate) + " Hz");
  }
  w.samples = std::move(samples);
  w.sample_rate = kSampleRate;
  return w;
}

void save_wav(const std::string& path, const Waveform& w) {
  EMTTS_CHECK(w.sample_rate == kSampleRate, "save_wav expects 22050 Hz");
  std::ofstream out(path, std::ios::binary);
  EMTTS_CHECK(out.good(), "cannot write WAV file: " << path);
  const uint32_t data_bytes = static_cast<uint32_t>(w.samples.size() * 2);
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  const uint16_t fmt[] = {1, 1};  // PCM, mono
  out.write(reinterpret_cast<const char*>(fmt), 4);
  write_u32(out, kSampleRate);
  write_u32(out, kSampleRate * 2);
  const uint16_t tail[] = {2, 16};  // block align, bits
  out.write(reinterpret_cast<const char*>(tail), 4);
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (real v : w.samples) {
    const real c = std::clamp(v, -1.0, 1.0);
    const auto s = static_cast<int16_t>(std::lround(c * 32767.0));
    out.write(reinterpret_cast<const char*>(&s), 2);
  }
}

std::vector<real> resample_linear(const std::vector<real>& x, int src_rate, int dst_rate) {
  EMTTS_CHECK(src_rate > 0 && dst_rate > 0, "resample rates must be positive");
  if (src_rate == dst_rate || x.empty()) return x;
  const auto n_out = static_cast<int64_t>(static_cast<double>(x.size()) * dst_rate / src_rate);
  std::vector<real> y(static_cast<size_t>(std::max<int64_t>(n_out, 1)));
  const double step = static_cast<double>(src_rate) / dst_rate;
  const int64_t n_in = static_cast<int64_t>(x.size());
  for (int64_t i = 0; i < static_cast<int64_t>(y.size()); ++i) {
    const double p = i * step;
    const auto k = static_cast<int64_t>(p);
    const double frac = p - k;
    const real a = x[std::min(k, n_in - 1)];
    const real b = x[std::min(k + 1, n_in - 1)];
    y[i] = a + static_cast<real>(frac) * (b - a);
  }
  return y;
}

Tensor stft_magnitude(const std::vector<real>& samples, const DspConfig& cfg) {
  const auto spec = stft_complex(samples, cfg);
  const int frames = static_cast<int>(spec.size());
  Tensor mag({cfg.full_bins(), frames});
  for (int t = 0; t < frames; ++t)
    for (int b = 0; b < cfg.full_bins(); ++b) mag.at(b, t) = std::abs(spec[t][b]);
  return mag;
}

Tensor mel_filterbank(int n_mels, int n_fft, int sample_rate) {
  const int bins = n_fft / 2 + 1;
  const real f_max = static_cast<real>(sample_rate) / 2.0;
  auto to_mel = [](real f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto from_mel = [](real m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const real m_lo = to_mel(0.0), m_hi = to_mel(f_max);
  std::vector<real> edges(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i)
    edges[i] = from_mel(m_lo + (m_hi - m_lo) * i / (n_mels + 1));
  Tensor fb({n_mels, bins});
  for (int m = 0; m < n_mels; ++m) {
    const real lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (int b = 0; b < bins; ++b) {
      const real f = static_cast<real>(b) * sample_rate / n_fft;
      real w = 0.0;
      if (f > lo && f < hi)
        w = (f <= mid) ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      fb.at(m, b) = w;
    }
  }
  return fb;
}

Tensor normalize_db(const Tensor& mag, const DspConfig& cfg) {
  Tensor out = mag;
  for (auto& v : out.vec()) {
    const real db = 20.0 * std::log10(std::max(v, kMagFloor));
    v = std::clamp((db - cfg.ref_db + cfg.max_db) / cfg.max_db, 0.0, 1.0);
  }
  return out;
}

Tensor denormalize_db(const Tensor& norm, const DspConfig& cfg) {
  Tensor out = norm;
  for (auto& v : out.vec()) {
    const real db = std::clamp(v, 0.0, 1.0) * cfg.max_db - cfg.max_db + cfg.ref_db;
    v = std::pow(10.0, db / 20.0);
  }
  return out;
}

Tensor decimate_time(const Tensor& spec, int reduction) {
  EMTTS_CHECK(spec.rank() == 2 && reduction >= 1, "decimate_time: bad arguments");
  const int rows = spec.extent(0), cols = spec.extent(1);
  const int out_cols = (cols + reduction - 1) / reduction;
  Tensor out({rows, out_cols});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < out_cols; ++c) out.at(r, c) = spec.at(r, c * reduction);
  return out;
}

namespace {

Tensor pad_cols_to_multiple(const Tensor& spec, int multiple) {
  const int rows = spec.extent(0), cols = spec.extent(1);
  const int padded = ((cols + multiple - 1) / multiple) * multiple;
  if (padded == cols) return spec;
  Tensor out({rows, padded});
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out.at(r, c) = spec.at(r, c);
  return out;
}

}  // namespace

Tensor mel_full_rate(const Waveform& w, const DspConfig& cfg) {
  cfg.validate();
  EMTTS_CHECK(!w.samples.empty(), "empty waveform");
  const auto pre = apply_preemphasis(w.samples, cfg.preemphasis);
  Tensor mag = pad_cols_to_multiple(stft_magnitude(pre, cfg), cfg.reduction);
  Tensor mel = kernels::matmul(mel_filterbank(cfg.n_mels, cfg.n_fft, kSampleRate), mag,
                               false, false);
  return normalize_db(mel, cfg);
}

SpectrogramPair spectrogram_pair(const Waveform& w, const DspConfig& cfg) {
  cfg.validate();
  EMTTS_CHECK(!w.samples.empty(), "empty waveform");
  const auto pre = apply_preemphasis(w.samples, cfg.preemphasis);
  Tensor mag = pad_cols_to_multiple(stft_magnitude(pre, cfg), cfg.reduction);
  SpectrogramPair pair;
  pair.linear_full = normalize_db(mag, cfg);
  Tensor mel = kernels::matmul(mel_filterbank(cfg.n_mels, cfg.n_fft, kSampleRate), mag,
                               false, false);
  pair.mel_coarse = decimate_time(normalize_db(mel, cfg), cfg.reduction);
  return pair;
}

real gl_consistency_error(const std::vector<real>& x, const Tensor& target_mag,
                          const DspConfig& cfg) {
  Tensor mag = stft_magnitude(x, cfg);
  real acc = 0.0;
  const int bins = target_mag.extent(0);
  const int cols = std::min(mag.extent(1), target_mag.extent(1));
  for (int b = 0; b < bins; ++b)
    for (int t = 0; t < cols; ++t) {
      const real d = mag.at(b, t) - target_mag.at(b, t);
      acc += d * d;
    }
  return std::sqrt(acc);
}

Waveform griffin_lim(const Tensor& linear_norm, const DspConfig& cfg,
                     std::vector<real>* consistency_trace) {
  cfg.validate();
  EMTTS_CHECK(linear_norm.rank() == 2 && linear_norm.extent(0) == cfg.full_bins(),
              "griffin_lim: expected " << cfg.full_bins() << " bins, got "
              << linear_norm.shape_str());
  const int frames = linear_norm.extent(1);
  Tensor mag = denormalize_db(linear_norm, cfg);
  for (auto& v : mag.vec()) v = std::pow(v, cfg.sharpening_power);
  // A fully zero (silent) target would round-trip the dB floor; keep
  // silence silent.
  const bool silent = linear_norm.max() <= 0.0;

  // Work length chosen so the re-analysis frame count matches `frames`.
  const int64_t work_len = static_cast<int64_t>(frames - 1) * cfg.hop;
  std::vector<std::vector<std::complex<real>>> spec(
      frames, std::vector<std::complex<real>>(cfg.full_bins()));
  for (int t = 0; t < frames; ++t)
    for (int b = 0; b < cfg.full_bins(); ++b) spec[t][b] = {mag.at(b, t), 0.0};

  std::vector<real> x;
  if (silent || work_len < cfg.win) {
    x.assign(static_cast<size_t>(std::max<int64_t>(work_len, 0)), 0.0);
  } else {
    x = istft(spec, cfg, work_len);
    for (int it = 0; it < cfg.gl_iterations; ++it) {
      auto est = stft_complex(x, cfg);
      real err = 0.0;
      for (int t = 0; t < frames && t < static_cast<int>(est.size()); ++t) {
        for (int b = 0; b < cfg.full_bins(); ++b) {
          const real a = std::abs(est[t][b]);
          const real d = a - mag.at(b, t);
          err += d * d;
          spec[t][b] = (a > 0.0) ? est[t][b] / a * mag.at(b, t)
                                 : std::complex<real>(mag.at(b, t), 0.0);
        }
      }
      if (consistency_trace) consistency_trace->push_back(std::sqrt(err));
      x = istft(spec, cfg, work_len);
    }
  }

  // Final synthesis at the contract length: frames * hop samples.
  const int64_t out_len = static_cast<int64_t>(frames) * cfg.hop;
  std::vector<real> y;
  if (silent) {
    y.assign(static_cast<size_t>(out_len), 0.0);
  } else {
    y = istft(spec, cfg, out_len);
    y = apply_deemphasis(y, cfg.preemphasis);
    real peak = 0.0;
    for (real v : y) peak = std::max(peak, std::fabs(v));
    if (peak > 0.0)
      for (auto& v : y) v *= 0.95 / peak;
  }
  Waveform w;
  w.samples = std::move(y);
  return w;
}

void save_spec(const std::string& path, const Tensor& spec) {
  EMTTS_CHECK(spec.rank() == 2, "save_spec: rank-2 tensor required");
  std::ofstream out(path, std::ios::binary);
  EMTTS_CHECK(out.good(), "cannot write spectrogram cache: " << path);
  out.write("EMSP", 4);
  write_u32(out, 1);  // version
  write_u32(out, static_cast<uint32_t>(spec.extent(0)));
  write_u32(out, static_cast<uint32_t>(spec.extent(1)));
  write_u32(out, 0);  // dtype f32
  for (real v : spec.vec()) {
    const float f = static_cast<float>(v);
    uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32(out, bits);
  }
}

Tensor load_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EMTTS_CHECK(in.good(), "cannot open spectrogram cache: " << path);
  char magic[4];
  in.read(magic, 4);
  EMTTS_CHECK(in.good() && std::memcmp(magic, "EMSP", 4) == 0,
              path << ": bad EMSP magic");
  const uint32_t version = read_u32(in);
  EMTTS_CHECK(version == 1, path << ": unsupported EMSP version " << version);
  const uint32_t rows = read_u32(in), cols = read_u32(in), dtype = read_u32(in);
  EMTTS_CHECK(dtype == 0, path << ": unsupported EMSP dtype " << dtype);
  EMTTS_CHECK(rows > 0 && cols > 0, path << ": empty spectrogram");
  Tensor spec({static_cast<int>(rows), static_cast<int>(cols)});
  for (auto& v : spec.vec()) {
    const uint32_t bits = read_u32(in);
    float f;
    std::memcpy(&f, &bits, 4);
    v = static_cast<real>(f);
  }
  EMTTS_CHECK(in.good(), path << ": truncated EMSP payload");
  return spec;
}

bool spec_header_ok(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return false;
  char magic[4];
  in.read(magic, 4);
  if (!in.good() || std::memcmp(magic, "EMSP", 4) != 0) return false;
  const uint32_t version = read_u32(in);
  const uint32_t rows = read_u32(in), cols = read_u32(in), dtype = read_u32(in);
  return in.good() && version == 1 && rows > 0 && cols > 0 && dtype == 0;
}

void write_pgm(const std::string& path, const Tensor& a) {
  EMTTS_CHECK(a.rank() == 2, "write_pgm: rank-2 tensor required");
  std::ofstream out(path, std::ios::binary);
  EMTTS_CHECK(out.good(), "cannot write PGM: " << path);
  out << "P5\n" << a.extent(1) << " " << a.extent(0) << "\n255\n";
  for (int r = 0; r < a.extent(0); ++r)
    for (int c = 0; c < a.extent(1); ++c) {
      const real v = std::clamp(a.at(r, c), 0.0, 1.0);
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
}

}  // namespace emtts
