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


#pragma once

#include <cstddef>

namespace ada3d::simd {

/// Grouped, stride-1, zero-padded ("same") convolution over a 3D grid with
/// channels last. Lower-dimensional convolutions use extent/kernel 1 on the
/// unused axes. Weights are laid out (k0, k1, k2, in_channels/groups,
/// out_channels), with the output channel running fastest.
struct ConvGeometry {
  std::size_t extent[3];
  std::size_t kernel[3];
  std::size_t in_channels;
  std::size_t out_channels;
  std::size_t groups;
};

/// Per-voxel adaptive depth-wise convolution over an extent[0] x extent[1] x
/// extent[2] grid with `channels` channels and cubic kernel extent `k`.
/// Kernel field layout is (voxel, channel, offset), offsets enumerated
/// row-major over p_i - p_j in {-(k-1)/2 .. (k-1)/2}^3.
struct AdaptiveGeometry {
  std::size_t extent[3];
  std::size_t channels;
  std::size_t k;
};

/// One implementation of the inner loops. Every variant performs the same
/// multiply-then-add sequence per output element, so results are bit-identical
/// across variants.
struct KernelTable {
  const char* name;

  /// y = conv(x, w) + bias. `bias` may be null. `y` is overwritten.
  void (*conv_forward)(const ConvGeometry& g, const double* x, const double* w,
                       const double* bias, double* y);

  /// dx += conv^T(dy). Takes weights pre-transposed to (k0, k1, k2,
  /// out_channels, in_channels/groups).
  void (*conv_backward_input)(const ConvGeometry& g, const double* w_transposed,
                              const double* dy, double* dx);

  /// dw += x (*) dy, same layout as the forward weights.
  void (*conv_backward_weight)(const ConvGeometry& g, const double* x, const double* dy,
                               double* dw);

  /// out = d + sum_o K(i, c, o) * fb(i - o, c). `d` may be null.
  void (*adaptive_forward)(const AdaptiveGeometry& g, const double* fb, const double* kernels,
                           const double* d, double* out);

  /// dfb += K^T dout (if dfb non-null); dkernels = dout * fb-window (overwritten,
  /// if non-null).
  void (*adaptive_backward)(const AdaptiveGeometry& g, const double* fb, const double* kernels,
                            const double* dout, double* dfb, double* dkernels);
};

const KernelTable& scalar_kernels();

/// AVX2 variant, or null when not compiled in or not supported by this CPU.
const KernelTable* avx2_kernels();

/// Variant used by the library. Chosen once: AVX2 when available, unless the
/// ADA3D_SIMD environment variable is set to "scalar".
const KernelTable& active_kernels();

/// Overrides the active variant (tests and benchmarks).
void set_active_kernels(const KernelTable& table);

}  // namespace ada3d::simd
