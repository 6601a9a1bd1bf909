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
#include <string>
#include <vector>

#include "ada3d/autodiff.hpp"
#include "ada3d/params.hpp"

namespace ada3d {

/// Hyper-parameters of one adaptive 3D convolution block.
struct Ada3DBlockConfig {
  std::size_t spatial_channels = 8;   // channels of the spatial feature map
  std::size_t spectral_channels = 8;  // channels of the spectral feature map
  std::size_t k = 3;                  // odd kernel extent
  double alpha = 1.0;                 // spatial generator hidden width multiplier
  double beta = 1.0;                  // spectral generator hidden width multiplier
  bool normalize = true;              // standardize every k^3 kernel field

  /// round(alpha * spectral_channels); ConfigError when it rounds to 0.
  std::size_t spatial_hidden() const;
  /// round(beta * spectral_channels); ConfigError when it rounds to 0.
  std::size_t spectral_hidden() const;
  std::size_t field_size() const { return k * k * k; }
  void validate() const;
};

/// Learnable layers of a block. The four kernel-generator convolutions carry
/// no bias terms; the three bias-generator layers do.
struct Ada3DBlockWeights {
  ConvLayer spatial_gen1;   // conv2d 3x3: C_spat -> round(alpha C_spec)
  ConvLayer spatial_gen2;   // conv2d 3x3: hidden -> C_spec k^3
  ConvLayer spectral_gen1;  // conv1d 3:   C_spec -> round(beta C_spec)
  ConvLayer spectral_gen2;  // conv1d 3:   hidden -> C_spec k^3
  ConvLayer bias_spatial;   // conv2d 3x3: C_spat -> 1
  ConvLayer bias_spectral;  // conv1d 3:   C_spec -> 1
  ConvLayer bias_channel;   // linear:     C_spat + C_spec -> C_spec

  static Ada3DBlockWeights create(const Ada3DBlockConfig& cfg, ParameterSet& params,
                                  const std::string& prefix, Rng& rng);

  std::vector<Var> kernel_generator_parameters() const;
  std::vector<Var> bias_generator_parameters() const;
  std::vector<Var> parameters() const;
};

/// Per-voxel kernel field K (H x W x L x C x k x k x k) with its factors
/// K^a (H x W x C x k x k x k) and K^b (L x C x k x k x k).
struct Ada3DKernels {
  Var kernels;
  Var spatial;
  Var spectral;
};

/// Bias field D (H x W x L x C) with factors D^a (H x W), D^b (L), D^c (C).
struct AdaptiveBiases {
  Var biases;
  Var spatial;
  Var spectral;
  Var channel;
};

/// Fa: H x W x C_spat  ->  K^a: H x W x C_spec x k x k x k.
Var generate_spatial_kernels(const Var& fa, const Ada3DBlockConfig& cfg,
                             const Ada3DBlockWeights& w);

/// Fb: H x W x L x C_spec  ->  K^b: L x C_spec x k x k x k.
Var generate_spectral_kernels(const Var& fb, const Ada3DBlockConfig& cfg,
                              const Ada3DBlockWeights& w);

/// K(h, w, l, c, o) = K^a(h, w, c, o) * K^b(l, c, o).
Ada3DKernels combine_kernels(const Var& spatial, const Var& spectral);

/// Zero mean and unit L2 norm over every trailing k^3 field. Fields whose
/// centered norm is below 1e-8 become zero.
Var normalize_kernel_fields(const Var& kernels);
inline constexpr double kFieldNormEpsilon = 1e-8;

/// D(h, w, l, c) = D^a(h, w) * D^b(l) * D^c(c).
AdaptiveBiases combine_biases(const Var& spatial, const Var& spectral, const Var& channel);

AdaptiveBiases generate_biases(const Var& fa, const Var& fb, const Ada3DBlockConfig& cfg,
                               const Ada3DBlockWeights& w);

/// out(i, c) = D(i, c) + sum_{j in window(i)} K(p_i, c, p_i - p_j) * Fb(j, c),
/// zero padded, with offsets enumerated row-major over (h, w, l).
Var ada3d_apply(const Var& fb, const Var& kernels, const Var& biases);

/// Kernel generators, combination, normalization, bias generator, then ada3d_apply.
Var ada3d_block_forward(const Var& fa, const Var& fb, const Ada3DBlockConfig& cfg,
                        const Ada3DBlockWeights& w);

}  // namespace ada3d
