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

#include "ada3d/tensor.hpp"

namespace ada3d {

/// Convention for the per-band normalizer mu^2 in ERGAS.
enum class ErgasMean {
  kSquaredMean,  // (mean of the reference band)^2
  kMeanSquare,   // mean of the squared reference band
};

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kErgasEpsilon = 1e-12;

struct ErgasResult {
  double value = 0.0;
  std::size_t guarded_bands = 0;  // bands whose mu^2 hit the epsilon floor
};

struct SamResult {
  double degrees = 0.0;
  std::size_t excluded = 0;  // pixels with a zero-norm spectrum
};

struct CcResult {
  double value = 0.0;
  std::size_t excluded = 0;  // bands with zero variance
};

/// Quality indices of an estimate against a reference.
struct MetricReport {
  double psnr = 0.0;  // dB, capped at kPsnrCap
  double cc = 0.0;
  double ssim = 0.0;
  double sam = 0.0;  // degrees
  double ergas = 0.0;
  std::size_t sam_excluded = 0;
  std::size_t cc_excluded = 0;
  std::size_t ergas_guarded = 0;
};

// All images are H x W x L. `est` is the estimate, `ref` the reference.

/// Mean over bands of 10 log10(peak^2 / MSE_band); +inf when a band is exact.
double psnr(const Tensor& est, const Tensor& ref, double peak = 1.0);

/// Mean per-pixel spectral angle in degrees.
SamResult sam(const Tensor& est, const Tensor& ref);

/// (100 / r) sqrt(mean_b MSE_b / mu_b^2), mu taken from the reference band.
ErgasResult ergas(const Tensor& est, const Tensor& ref, double r = 4.0,
                  ErgasMean convention = ErgasMean::kSquaredMean);

/// Mean per-band Pearson correlation.
CcResult cc(const Tensor& est, const Tensor& ref);

/// Gaussian-windowed SSIM ("valid" windows), averaged over bands. The window
/// shrinks to the largest odd size that fits smaller images.
double ssim(const Tensor& est, const Tensor& ref, double peak = 1.0, std::size_t window = 11,
            double sigma = 1.5, double k1 = 0.01, double k2 = 0.03);

MetricReport evaluate_metrics(const Tensor& est, const Tensor& ref, double peak = 1.0,
                              double r = 4.0, ErgasMean convention = ErgasMean::kSquaredMean);

}  // namespace ada3d
