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
#include <cstdint>
#include <vector>

#include "ada3d/tensor.hpp"

namespace ada3d {

/// Default relative tolerance for matrix_rank.
inline constexpr double kRankTolerance = 1e-10;

/// Number of singular values of the matrix `m` (order 2) above tol * sigma_max.
/// Throws ConfigError for tol <= 0.
std::size_t matrix_rank(const Tensor& m, double tol = kRankTolerance);

/// Window matrix of a single-channel or multi-channel field. `x` is H x W
/// (spatial_dims 2) or H x W x L (spatial_dims 3), optionally with a trailing
/// channel axis. Row i holds x(p_i - o_t, c) at column t * C + c, offsets o_t
/// enumerated row-major over {-(k-1)/2 .. (k-1)/2}^dims, zero outside.
Tensor build_window_matrix(const Tensor& x, std::size_t k, std::size_t spatial_dims = 2);

struct SpectralProjectionTrial {
  double worst_pixel_error = 0.0;  // max over pixels of ||x - A^+ A x||_2
  std::size_t rank = 0;
};

struct SpectralProjectionReport {
  std::size_t bands = 0;     // L
  std::size_t channels = 0;  // C
  std::vector<SpectralProjectionTrial> trials;
  double min_worst_error = 0.0;
  double max_worst_error = 0.0;
  std::size_t min_rank = 0;
  std::size_t max_rank = 0;
};

/// Projects random spectra X (L x pixels) through random A (C x L) and
/// recovers them by least squares. Trial t uses seed + t.
SpectralProjectionReport spectral_projection_demo(std::size_t bands, std::size_t channels,
                                                  std::size_t trials, std::uint64_t seed,
                                                  std::size_t pixels = 64);

/// Same measurement for a caller-supplied A and X.
SpectralProjectionTrial spectral_projection_trial(const Tensor& a, const Tensor& x);

struct SolvabilityReport {
  double standard_residual = 0.0;  // min_x ||A x - b||_2
  double adaptive_residual = 0.0;  // per-row minimum-norm solutions
  std::size_t rank_a = 0;
  std::size_t rank_augmented = 0;  // rank of (A | b)
  std::size_t zero_rows = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
};

/// Standard (one shared kernel) versus adaptive (one kernel per row) solution
/// of A x = b. `b` has one entry per row of `a`.
SolvabilityReport compare_solvability(const Tensor& a, const Tensor& b);

/// Random H x W image, window matrix with a k x k kernel, random target.
SolvabilityReport conv_solvability_demo(std::size_t h, std::size_t w, std::size_t k,
                                        std::uint64_t seed);

}  // namespace ada3d
