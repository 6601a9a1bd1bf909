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


#include "loops.inl"

namespace ada3d::simd {
namespace {

struct ScalarOps {
  // y[i] += a * x[i]
  static void axpy(size_t n, double a, const double* x, double* y) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
  }
  // y[i] += a[i * stride] * x[i]
  static void strided_mac(size_t n, const double* a, size_t stride, const double* x, double* y) {
    for (size_t i = 0; i < n; ++i) y[i] += a[i * stride] * x[i];
  }
};

constexpr KernelTable kScalar = make_table<ScalarOps>("scalar");

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace ada3d::simd
