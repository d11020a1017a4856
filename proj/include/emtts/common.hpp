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

#ifndef EMTTS_COMMON_HPP_
#define EMTTS_COMMON_HPP_

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace emtts {

// All numerics run in 64-bit. Gradient checks need the precision and the
// desk-scale workloads are small enough that there is no reason to drop
// to 32-bit; cache files on disk are 32-bit (see SpecCache).
using real = double;

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define EMTTS_CHECK(cond, msg)                        \
  do {                                                \
    if (!(cond)) {                                    \
      std::ostringstream os__;                        \
      os__ << msg;                                    \
      throw ::emtts::Error(os__.str());               \
    }                                                 \
  } while (0)

// splitmix64: used to derive independent sub-seeds from (seed, tag...) so
// that per-utterance / per-step randomness is a pure function of the run
// seed and never depends on scheduling order.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a) {
  return splitmix64(seed ^ splitmix64(a));
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  return mix_seed(mix_seed(seed, a), b);
}

// FNV-1a, used for corpus split hashing and checkpoint checksums.
inline uint64_t fnv1a64(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace emtts

#endif  // EMTTS_COMMON_HPP_
