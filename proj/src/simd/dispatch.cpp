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


#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ada3d/simd/kernels.hpp"

namespace ada3d::simd {

#if defined(ADA3D_HAVE_AVX2)
const KernelTable& avx2_table_unchecked();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(ADA3D_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* select_default() {
  const char* env = std::getenv("ADA3D_SIMD");
  if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{select_default()};
  return slot;
}

}  // namespace

const KernelTable* avx2_kernels() {
#if defined(ADA3D_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

void set_active_kernels(const KernelTable& table) {
  active_slot().store(&table, std::memory_order_release);
}

}  // namespace ada3d::simd
