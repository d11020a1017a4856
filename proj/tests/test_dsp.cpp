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
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>

#include <doctest.h>

#include "emtts/dsp.hpp"

using namespace emtts;

namespace {

std::string tmp_path(const std::string& name) {
  return std::string("/tmp/emtts_test_") + name;
}

std::vector<real> sine(real freq, real seconds, real amp = 0.5) {
  std::vector<real> x(static_cast<size_t>(seconds * kSampleRate));
  for (size_t i = 0; i < x.size(); ++i)
    x[i] = amp * std::sin(2.0 * M_PI * freq * static_cast<real>(i) / kSampleRate);
  return x;
}

// Raw 16-bit PCM WAV writer with an arbitrary rate, test-owned.
void write_raw_wav(const std::string& path, const std::vector<int16_t>& pcm, uint32_t rate) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  out.write("RIFF", 4);
  u32(36 + static_cast<uint32_t>(pcm.size() * 2));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);
  u16(1);
  u32(rate);
  u32(rate * 2);
  u16(2);
  u16(16);
  out.write("data", 4);
  u32(static_cast<uint32_t>(pcm.size() * 2));
  out.write(reinterpret_cast<const char*>(pcm.data()), static_cast<std::streamsize>(pcm.size() * 2));
}

}  // namespace

TEST_CASE("fft matches a naive DFT") {
  const int n = 64;
  UniformStream us(3);
  std::vector<std::complex<real>> a(n);
  for (auto& v : a) v = {us.next_real(-1, 1), us.next_real(-1, 1)};
  auto b = a;
  fft_radix2(b, false);
  for (int k = 0; k < n; ++k) {
    std::complex<real> acc{0, 0};
    for (int i = 0; i < n; ++i)
      acc += a[i] * std::polar<real>(1.0, -2.0 * M_PI * k * i / n);
    CHECK(std::abs(acc - b[k]) < 1e-9);
  }
  fft_radix2(b, true);
  for (int i = 0; i < n; ++i) CHECK(std::abs(b[i] - a[i]) < 1e-12);
}

TEST_CASE("load_wav: silence, scaling convention, resampling") {
  const std::string p = tmp_path("silence.wav");
  write_raw_wav(p, std::vector<int16_t>(22050, 0), 22050);
  Waveform w = load_wav(p);
  CHECK(w.samples.size() == 22050);
  for (real v : w.samples) CHECK(v == 0.0);

  // full-scale square wave: -32768 and +32767
  std::vector<int16_t> sq(64);
  for (size_t i = 0; i < sq.size(); ++i) sq[i] = (i % 2) ? 32767 : -32768;
  const std::string p2 = tmp_path("square.wav");
  write_raw_wav(p2, sq, 22050);
  Waveform w2 = load_wav(p2);
  for (size_t i = 0; i < w2.samples.size(); ++i) {
    if (i % 2)
      CHECK(w2.samples[i] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-12));
    else
      CHECK(w2.samples[i] == -1.0);
  }

  // 2 s at 44100 Hz resamples to 44100 samples at 22050
  const std::string p3 = tmp_path("hi_rate.wav");
  write_raw_wav(p3, std::vector<int16_t>(88200, 1000), 44100);
  std::vector<std::string> warnings;
  Waveform w3 = load_wav(p3, &warnings);
  CHECK(w3.samples.size() == 44100);
  CHECK(w3.sample_rate == 22050);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("44100") != std::string::npos);
}

TEST_CASE("load_wav rejects a non-PCM header with the field name") {
  const std::string p = tmp_path("bad_fmt.wav");
  {
    std::ofstream out(p, std::ios::binary);
    auto u32 = [&](uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(3);  // IEEE float, not PCM
    u16(1);
    u32(22050);
    u32(22050 * 2);
    u16(2);
    u16(16);
    out.write("data", 4);
    u32(0);
  }
  try {
    load_wav(p);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("audio_format") != std::string::npos);
  }
}

TEST_CASE("spectrogram_pair: silence maps to all-zero normalized entries") {
  Waveform w;
  w.samples.assign(22050, 0.0);
  DspConfig cfg;
  SpectrogramPair p = spectrogram_pair(w, cfg);
  CHECK(p.linear_full.max() == 0.0);
  CHECK(p.mel_coarse.max() == 0.0);
  CHECK(p.linear_full.extent(0) == 513);
  CHECK(p.mel_coarse.extent(0) == 80);
}

TEST_CASE("spectrogram_pair: sine at bin-20 frequency peaks at bin 20") {
  DspConfig cfg;
  const real freq = 20.0 * kSampleRate / cfg.n_fft;  // ~430.66 Hz
  Waveform w;
  w.samples = sine(freq, 1.0);
  SpectrogramPair p = spectrogram_pair(w, cfg);
  const int frames = p.linear_full.extent(1);
  // interior frames only; edges see reflect padding and zero-pad columns
  int checked = 0;
  for (int t = 4; t < frames - 8; ++t) {
    int arg = 0;
    for (int b = 1; b < 513; ++b)
      if (p.linear_full.at(b, t) > p.linear_full.at(arg, t)) arg = b;
    CHECK(arg == 20);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("spectrogram shapes: coarse is every 4th frame, count = ceil(T/4)") {
  DspConfig cfg;
  Waveform w;
  w.samples = sine(300.0, 0.5);
  SpectrogramPair p = spectrogram_pair(w, cfg);
  CHECK(p.linear_full.extent(1) % 4 == 0);
  CHECK(p.mel_coarse.extent(1) == p.linear_full.extent(1) / 4);

  Tensor mel_full = mel_full_rate(w, cfg);
  CHECK(mel_full.extent(1) == p.linear_full.extent(1));
  // decimation picks full-rate indices 0, 4, 8, ...
  Tensor dec = decimate_time(mel_full, 4);
  REQUIRE(dec.same_shape(p.mel_coarse));
  for (int64_t i = 0; i < dec.size(); ++i) CHECK(dec.data()[i] == p.mel_coarse.data()[i]);
  for (int m = 0; m < 80; ++m) {
    CHECK(p.mel_coarse.at(m, 0) == mel_full.at(m, 0));
    CHECK(p.mel_coarse.at(m, 1) == mel_full.at(m, 4));
  }
}

TEST_CASE("all normalized entries live in [0,1]") {
  Waveform w;
  w.samples = sine(523.0, 0.3, 0.9);
  DspConfig cfg;
  SpectrogramPair p = spectrogram_pair(w, cfg);
  CHECK(p.linear_full.min() >= 0.0);
  CHECK(p.linear_full.max() <= 1.0);
  CHECK(p.mel_coarse.min() >= 0.0);
  CHECK(p.mel_coarse.max() <= 1.0);
}

TEST_CASE("normalize_db then denormalize_db is identity on the open range") {
  DspConfig cfg;
  Tensor mags({1, 5});
  mags.at(0, 0) = 1e-4;
  mags.at(0, 1) = 1e-2;
  mags.at(0, 2) = 0.5;
  mags.at(0, 3) = 1.0;
  mags.at(0, 4) = 9.0;
  Tensor round = denormalize_db(normalize_db(mags, cfg), cfg);
  for (int i = 0; i < 5; ++i)
    CHECK(round.at(0, i) == doctest::Approx(mags.at(0, i)).epsilon(1e-6));
}

TEST_CASE("waveform shorter than one window is rejected") {
  Waveform w;
  w.samples.assign(512, 0.1);
  DspConfig cfg;
  CHECK_THROWS_AS(spectrogram_pair(w, cfg), Error);
}

TEST_CASE("griffin_lim: zero spectrogram gives zero waveform") {
  DspConfig cfg;
  cfg.gl_iterations = 3;
  Tensor s({513, 8});
  Waveform w = griffin_lim(s, cfg);
  CHECK(w.samples.size() == 8u * 256u);
  for (real v : w.samples) CHECK(v == 0.0);
}

TEST_CASE("griffin_lim round trip keeps the sine's spectral peak") {
  DspConfig cfg;
  cfg.gl_iterations = 60;
  const real freq = 20.0 * kSampleRate / cfg.n_fft;
  Waveform ref;
  ref.samples = sine(freq, 0.6);
  SpectrogramPair p = spectrogram_pair(ref, cfg);
  Waveform rec = griffin_lim(p.linear_full, cfg);
  CHECK(rec.samples.size() == static_cast<size_t>(p.linear_full.extent(1)) * 256);

  SpectrogramPair p2 = spectrogram_pair(rec, cfg);
  const int frames = std::min(p.linear_full.extent(1), p2.linear_full.extent(1));
  for (int t = 4; t < frames - 8; ++t) {
    int arg = 0;
    for (int b = 1; b < 513; ++b)
      if (p2.linear_full.at(b, t) > p2.linear_full.at(arg, t)) arg = b;
    CHECK(arg == 20);
  }
}

TEST_CASE("griffin_lim consistency error is non-increasing") {
  DspConfig cfg;
  cfg.gl_iterations = 25;
  UniformStream us(17);
  Tensor s({513, 12});
  for (auto& v : s.vec()) v = us.next_real01() * 0.6;
  std::vector<real> trace;
  griffin_lim(s, cfg, &trace);
  REQUIRE(trace.size() == 25);
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("EMSP cache round trip and header check") {
  Tensor s({3, 4});
  UniformStream us(5);
  for (auto& v : s.vec()) v = us.next_real01();
  const std::string p = tmp_path("cache.emsp");
  save_spec(p, s);
  CHECK(spec_header_ok(p));
  Tensor r = load_spec(p);
  REQUIRE(r.same_shape(s));
  // values survive the f32 round trip
  for (int64_t i = 0; i < s.size(); ++i)
    CHECK(r.data()[i] == doctest::Approx(s.data()[i]).epsilon(1e-6));
  CHECK(!spec_header_ok(tmp_path("missing.emsp")));

  std::ofstream bad(tmp_path("bad.emsp"), std::ios::binary);
  bad << "NOPE";
  bad.close();
  CHECK(!spec_header_ok(tmp_path("bad.emsp")));
  CHECK_THROWS_AS(load_spec(tmp_path("bad.emsp")), Error);
}

TEST_CASE("wav save/load round trip") {
  Waveform w;
  w.samples = sine(440.0, 0.1, 0.8);
  const std::string p = tmp_path("rt.wav");
  save_wav(p, w);
  Waveform r = load_wav(p);
  REQUIRE(r.samples.size() == w.samples.size());
  for (size_t i = 0; i < r.samples.size(); ++i)
    CHECK(r.samples[i] == doctest::Approx(w.samples[i]).epsilon(1e-3));
}

TEST_CASE("pgm writer emits a parseable header") {
  Tensor a({2, 3});
  a.at(0, 0) = 1.0;
  const std::string p = tmp_path("att.pgm");
  write_pgm(p, a);
  std::ifstream in(p, std::ios::binary);
  std::string magic;
  int wdt, hgt, maxv;
  in >> magic >> wdt >> hgt >> maxv;
  CHECK(magic == "P5");
  CHECK(wdt == 3);
  CHECK(hgt == 2);
  CHECK(maxv == 255);
}
