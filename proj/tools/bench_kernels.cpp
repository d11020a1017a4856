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

// Times the OpenMP kernels against the serial reference kernels and checks
// that the two produce bit-identical results.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "emtts/kernels.hpp"
#include "emtts/kernels_ref.hpp"

using namespace emtts;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<Tensor()>& fn, int reps, Tensor* out) {
  *out = fn();  // warmup + result capture
  const auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) {
    Tensor r = fn();
    if (r.size() == 0) std::abort();
  }
  const auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

bool bit_identical(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) return false;
  for (int64_t i = 0; i < a.size(); ++i)
    if (a.data()[i] != b.data()[i]) return false;
  return true;
}

void report(const char* name, double flops, double serial_ms, double omp_ms, bool match) {
  std::printf("%-28s serial %8.3f ms (%6.2f GF/s)   omp %8.3f ms (%6.2f GF/s)   speedup %4.2fx   %s\n",
              name, serial_ms, flops / serial_ms * 1e-6, omp_ms, flops / omp_ms * 1e-6,
              serial_ms / omp_ms, match ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("kernel benchmark, %d OpenMP threads\n\n", omp_get_max_threads());

  {
    const int cin = 256, cout = 512, t = 256, k = 3;
    Tensor x = Tensor::gaussian({cin, t}, 1.0, 1);
    Tensor w = Tensor::gaussian({cout, cin, k}, 0.05, 2);
    Tensor b = Tensor::gaussian({cout}, 0.05, 3);
    Tensor rs, ro;
    const double flops = 2.0 * cout * cin * t * k;
    const double ms_s = time_ms([&] { return ref::conv1d_forward(x, w, b, 1, true); }, 5, &rs);
    const double ms_o = time_ms([&] { return kernels::conv1d_forward(x, w, b, 1, true); }, 5, &ro);
    report("conv1d fwd 256x512 T=256", flops, ms_s, ms_o, bit_identical(rs, ro));
  }
  {
    const int cin = 256, cout = 512, t = 256, k = 3;
    Tensor dy = Tensor::gaussian({cout, t}, 1.0, 4);
    Tensor x = Tensor::gaussian({cin, t}, 1.0, 5);
    Tensor rs, ro;
    const double flops = 2.0 * cout * cin * t * k;
    const double ms_s =
        time_ms([&] { return ref::conv1d_backward_weight(dy, x, k, 3, false); }, 5, &rs);
    const double ms_o =
        time_ms([&] { return kernels::conv1d_backward_weight(dy, x, k, 3, false); }, 5, &ro);
    report("conv1d bwd-w 256x512 T=256", flops, ms_s, ms_o, bit_identical(rs, ro));
  }
  {
    const int cin = 512, cout = 512, t = 128;
    Tensor x = Tensor::gaussian({cin, t}, 1.0, 6);
    Tensor w = Tensor::gaussian({cin, cout, 2}, 0.05, 7);
    Tensor rs, ro;
    const double flops = 2.0 * cout * cin * t * 2;
    const double ms_s = time_ms([&] { return ref::deconv2_forward(x, w); }, 5, &rs);
    const double ms_o = time_ms([&] { return kernels::deconv2_forward(x, w); }, 5, &ro);
    report("deconv2 fwd 512x512 T=128", flops, ms_s, ms_o, bit_identical(rs, ro));
  }
  {
    const int m = 384, kk = 384, n = 384;
    Tensor a = Tensor::gaussian({m, kk}, 1.0, 8);
    Tensor b = Tensor::gaussian({kk, n}, 1.0, 9);
    Tensor rs, ro;
    const double flops = 2.0 * m * kk * n;
    const double ms_s = time_ms([&] { return ref::matmul(a, b, false, false); }, 5, &rs);
    const double ms_o = time_ms([&] { return kernels::matmul(a, b, false, false); }, 5, &ro);
    report("matmul 384^3", flops, ms_s, ms_o, bit_identical(rs, ro));
  }
  return 0;
}
