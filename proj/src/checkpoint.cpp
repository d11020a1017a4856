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

#include "emtts/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace emtts {

namespace {

constexpr uint32_t kVersion = 1;

class Writer {
 public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(uint16_t v) {
    for (int i = 0; i < 2; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(real v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
  void str(const std::string& s) {
    EMTTS_CHECK(s.size() <= 0xFFFF, "checkpoint string too long");
    u16(static_cast<uint16_t>(s.size()));
    buf_.append(s);
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  Reader(const std::string& buf, size_t pos) : buf_(buf), pos_(pos) {}
  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(buf_[pos_++]);
  }
  uint16_t u16() {
    need(2);
    uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<uint16_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(buf_[pos_++])) << (8 * i);
    return v;
  }
  real f64() {
    const uint64_t bits = u64();
    real v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    const uint16_t n = u16();
    need(n);
    std::string s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  size_t pos() const { return pos_; }

 private:
  void need(size_t n) const {
    EMTTS_CHECK(pos_ + n <= buf_.size(), "checkpoint truncated");
  }
  const std::string& buf_;
  size_t pos_;
};

void write_tensor(Writer& w, const Tensor& t) {
  w.u8(static_cast<uint8_t>(t.rank()));
  for (int e : t.shape()) w.u32(static_cast<uint32_t>(e));
  for (real v : t.vec()) w.f64(v);
}

Tensor read_tensor(Reader& r) {
  const int rank = r.u8();
  EMTTS_CHECK(rank >= 1 && rank <= 3, "checkpoint tensor has bad rank " << rank);
  std::vector<int> shape(rank);
  for (int& e : shape) e = static_cast<int>(r.u32());
  Tensor t(shape);
  for (auto& v : t.vec()) v = r.f64();
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::string& module, uint64_t step,
                     const ModelParams& params, const AdamState& adam,
                     const std::map<std::string, std::string>& config,
                     const std::vector<uint32_t>& vocab) {
  EMTTS_CHECK(adam.m.size() == params.count(), "adam state / params size mismatch");
  Writer w;
  w.u32(kVersion);
  w.str(module);
  w.u64(step);
  w.u32(static_cast<uint32_t>(config.size()));
  for (const auto& [k, v] : config) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<uint32_t>(vocab.size()));
  for (uint32_t cp : vocab) w.u32(cp);
  w.u32(static_cast<uint32_t>(params.count()));
  for (size_t i = 0; i < params.count(); ++i) {
    w.str(params.at(i).name);
    write_tensor(w, params.at(i).value);
  }
  w.u64(adam.step);
  for (size_t i = 0; i < params.count(); ++i) {
    write_tensor(w, adam.m[i]);
    write_tensor(w, adam.v[i]);
  }

  std::ofstream out(path, std::ios::binary);
  EMTTS_CHECK(out.good(), "cannot write checkpoint: " << path);
  out.write("EMTT", 4);
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));
  const uint64_t sum = fnv1a64(w.data().data(), w.data().size());
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((sum >> (8 * i)) & 0xFF));
  EMTTS_CHECK(out.good(), "failed writing checkpoint: " << path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  EMTTS_CHECK(in.good(), "cannot open checkpoint: " << path);
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EMTTS_CHECK(buf.size() > 12 && buf.compare(0, 4, "EMTT") == 0,
              path << ": bad EMTT magic");
  const std::string payload = buf.substr(4, buf.size() - 12);
  uint64_t stored = 0;
  for (int i = 0; i < 8; ++i)
    stored |= static_cast<uint64_t>(static_cast<unsigned char>(buf[buf.size() - 8 + i]))
              << (8 * i);
  EMTTS_CHECK(stored == fnv1a64(payload.data(), payload.size()),
              path << ": checksum mismatch, checkpoint corrupt");

  Reader r(payload, 0);
  const uint32_t version = r.u32();
  EMTTS_CHECK(version == kVersion, path << ": unsupported checkpoint version " << version);
  LoadedCheckpoint ck;
  ck.module = r.str();
  ck.step = r.u64();
  const uint32_t ncfg = r.u32();
  for (uint32_t i = 0; i < ncfg; ++i) {
    std::string k = r.str();
    ck.config[k] = r.str();
  }
  const uint32_t nvocab = r.u32();
  ck.vocab.resize(nvocab);
  for (auto& cp : ck.vocab) cp = r.u32();
  const uint32_t nparams = r.u32();
  for (uint32_t i = 0; i < nparams; ++i) {
    std::string name = r.str();
    ck.params.emplace_back(std::move(name), read_tensor(r));
  }
  ck.adam.step = r.u64();
  for (uint32_t i = 0; i < nparams; ++i) {
    ck.adam.m.push_back(read_tensor(r));
    ck.adam.v.push_back(read_tensor(r));
  }
  return ck;
}

void apply_checkpoint(const LoadedCheckpoint& ck, ModelParams& params, AdamState* adam) {
  EMTTS_CHECK(ck.params.size() == params.count(),
              "checkpoint holds " << ck.params.size() << " parameters but the model has "
              << params.count());
  for (size_t i = 0; i < params.count(); ++i) {
    Parameter& p = params.at(i);
    const auto& [name, value] = ck.params[i];
    EMTTS_CHECK(name == p.name, "checkpoint parameter order mismatch: expected "
                << p.name << ", found " << name);
    EMTTS_CHECK(value.same_shape(p.value), "checkpoint shape mismatch for " << name
                << ": " << value.shape_str() << " vs " << p.value.shape_str());
    p.value = value;
  }
  if (adam) {
    *adam = ck.adam;
    EMTTS_CHECK(adam->m.size() == params.count(), "checkpoint adam state incomplete");
  }
}

}  // namespace emtts
