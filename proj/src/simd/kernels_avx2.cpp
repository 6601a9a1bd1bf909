// Copyright 2026 The Ada3D Authors. All Rights Reserved.
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


// Compiled with -mavx2 (no FMA: products are rounded before the add, exactly
// as in the scalar variant).

#include <immintrin.h>

#include "loops.inl"

namespace ada3d::simd {
namespace {

struct Avx2Ops {
  static void axpy(size_t n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
      _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += a * x[i];
  }

  static void strided_mac(size_t n, const double* a, size_t stride, const double* x, double* y) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const double* ai = a + i * stride;
      const __m256d va = _mm256_set_pd(ai[3 * stride], ai[2 * stride], ai[stride], ai[0]);
      const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
      _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
    }
    for (; i < n; ++i) y[i] += a[i * stride] * x[i];
  }
};

constexpr KernelTable kAvx2 = make_table<Avx2Ops>("avx2");

}  // namespace

// Raw table accessor; dispatch.cpp checks CPU support before handing it out.
const KernelTable& avx2_table_unchecked() { return kAvx2; }

}  // namespace ada3d::simd
