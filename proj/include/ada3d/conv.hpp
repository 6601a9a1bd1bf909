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
#include <optional>
#include <vector>

#include "ada3d/autodiff.hpp"
#include "ada3d/tensor.hpp"

namespace ada3d {

/// Stride-1, "same" zero-padded convolution. Kernel extents are odd, one per
/// spatial axis (1, 2 or 3 of them). Weights have shape
/// (kernel..., in_channels / groups, out_channels); bias has shape (out_channels).
struct ConvSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::vector<std::size_t> kernel;
  std::size_t groups = 1;
  bool bias = true;

  Shape weight_shape() const;
  Shape bias_shape() const { return Shape{out_channels}; }
  /// Fan-in of one output unit: in_channels / groups times the kernel volume.
  std::size_t fan_in() const;
  /// Learnable element count (weights plus optional bias).
  std::size_t param_count() const;
  /// Throws ConfigError when groups or kernel extents are invalid.
  void validate() const;
};

ConvSpec conv1d_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t groups = 1,
                     bool bias = true);
ConvSpec conv2d_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t groups = 1,
                     bool bias = true);
ConvSpec conv3d_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t groups = 1,
                     bool bias = true);

/// x: L x C_in  ->  L x C_out.
Var conv1d(const Var& x, const ConvSpec& spec, const Var& weights,
           const std::optional<Var>& bias = std::nullopt);
/// x: H x W x C_in  ->  H x W x C_out.
Var conv2d(const Var& x, const ConvSpec& spec, const Var& weights,
           const std::optional<Var>& bias = std::nullopt);
/// x: H x W x L x C_in  ->  H x W x L x C_out. groups = C gives depth-wise.
Var conv3d(const Var& x, const ConvSpec& spec, const Var& weights,
           const std::optional<Var>& bias = std::nullopt);

/// Dense map of a vector: x (C_in) -> (C_out) with weights (C_in, C_out).
Var linear(const Var& x, const Var& weights, const std::optional<Var>& bias = std::nullopt);

/// Keys cubic convolution weight (a = -0.5) at distance t.
double keys_cubic(double t);

/// Per-band bicubic upsampling of h x w x L by integer factor r. Output pixel
/// X samples source coordinate (X + 0.5) / r - 0.5, clamped to the source
/// extent; neighbour indices are clamped to the edge. Requires h, w >= 2.
Var bicubic_upsample(const Var& x, std::size_t r);

/// Depth-to-space: h x w x (r*r*L) -> (r*h) x (r*w) x L with
/// out(y*r + dy, x*r + dx, l) = in(y, x, l*r*r + dy*r + dx).
Var pixel_shuffle(const Var& x, std::size_t r);

/// 3x3 conv L -> r*r*L followed by pixel_shuffle.
Var pixel_shuffle_upsample(const Var& x, std::size_t r, const Var& weights,
                           const std::optional<Var>& bias = std::nullopt);

/// Mean over the two leading (spatial) axes: H x W x rest -> rest.
Var global_avg_pool_spatial(const Var& x);

}  // namespace ada3d
