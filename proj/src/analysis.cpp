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


#include "ada3d/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ada3d/error.hpp"
#include "ada3d/random.hpp"

namespace ada3d {
namespace {

Eigen::MatrixXd to_matrix(const Tensor& m) {
  if (m.order() != 2) throw ShapeError("expected a matrix, got " + to_string(m.shape()));
  Eigen::MatrixXd out(m.dim(0), m.dim(1));
  for (std::size_t i = 0; i < m.dim(0); ++i) {
    for (std::size_t j = 0; j < m.dim(1); ++j) out(i, j) = m[i * m.dim(1) + j];
  }
  return out;
}

std::size_t rank_of(const Eigen::MatrixXd& m, double tol) {
  if (m.size() == 0) throw ShapeError("rank of an empty matrix");
  const Eigen::VectorXd s = m.jacobiSvd().singularValues();
  const double cutoff = tol * s(0);
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++r;
  }
  return r;
}

}  // namespace

std::size_t matrix_rank(const Tensor& m, double tol) {
  if (!(tol > 0.0)) throw ConfigError("rank tolerance must be positive");
  return rank_of(to_matrix(m), tol);
}

Tensor build_window_matrix(const Tensor& x, std::size_t k, std::size_t spatial_dims) {
  if (k == 0 || k % 2 == 0) throw ConfigError("window size must be odd, got " + std::to_string(k));
  if (spatial_dims != 2 && spatial_dims != 3) throw ConfigError("spatial_dims must be 2 or 3");
  if (x.order() != spatial_dims && x.order() != spatial_dims + 1) {
    throw ShapeError("window matrix input " + to_string(x.shape()) + " has the wrong order");
  }
  std::size_t ext[3] = {1, 1, 1};
  for (std::size_t d = 0; d < spatial_dims; ++d) ext[d] = x.dim(d);
  const std::size_t c = x.order() > spatial_dims ? x.dim(spatial_dims) : 1;
  const long r = static_cast<long>(k / 2);
  const long r3 = spatial_dims == 3 ? r : 0;
  const std::size_t taps = spatial_dims == 3 ? k * k * k : k * k;
  const std::size_t rows = ext[0] * ext[1] * ext[2];
  Tensor a(Shape{rows, taps * c});
  std::size_t row = 0;
  for (long i0 = 0; i0 < static_cast<long>(ext[0]); ++i0) {
    for (long i1 = 0; i1 < static_cast<long>(ext[1]); ++i1) {
      for (long i2 = 0; i2 < static_cast<long>(ext[2]); ++i2, ++row) {
        std::size_t t = 0;
        for (long o0 = -r; o0 <= r; ++o0) {
          for (long o1 = -r; o1 <= r; ++o1) {
            for (long o2 = -r3; o2 <= r3; ++o2, ++t) {
              const long s0 = i0 - o0, s1 = i1 - o1, s2 = i2 - o2;
              if (s0 < 0 || s1 < 0 || s2 < 0 || s0 >= static_cast<long>(ext[0]) ||
                  s1 >= static_cast<long>(ext[1]) || s2 >= static_cast<long>(ext[2])) {
                continue;
              }
              const std::size_t src =
                  ((static_cast<std::size_t>(s0) * ext[1] + static_cast<std::size_t>(s1)) * ext[2] +
                   static_cast<std::size_t>(s2)) * c;
              for (std::size_t ch = 0; ch < c; ++ch) {
                a[row * taps * c + t * c + ch] = x[src + ch];
              }
            }
          }
        }
      }
    }
  }
  return a;
}

SpectralProjectionTrial spectral_projection_trial(const Tensor& a, const Tensor& x) {
  const Eigen::MatrixXd am = to_matrix(a);
  const Eigen::MatrixXd xm = to_matrix(x);
  if (am.cols() != xm.rows()) {
    throw ShapeError("projection " + to_string(a.shape()) + " does not act on spectra " +
                     to_string(x.shape()));
  }
  const Eigen::MatrixXd y = am * xm;
  const Eigen::MatrixXd rec = am.completeOrthogonalDecomposition().solve(y);
  SpectralProjectionTrial t;
  t.rank = rank_of(am, kRankTolerance);
  t.worst_pixel_error = (rec - xm).colwise().norm().maxCoeff();
  return t;
}

SpectralProjectionReport spectral_projection_demo(std::size_t bands, std::size_t channels,
                                                  std::size_t trials, std::uint64_t seed,
                                                  std::size_t pixels) {
  if (bands == 0 || channels == 0 || pixels == 0) {
    throw ConfigError("spectral projection demo needs L, C and pixels >= 1");
  }
  SpectralProjectionReport rep;
  rep.bands = bands;
  rep.channels = channels;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(seed + t);
    const Tensor a = random_normal(Shape{channels, bands}, rng);
    const Tensor x = random_uniform(Shape{bands, pixels}, rng, 0.0, 1.0);
    rep.trials.push_back(spectral_projection_trial(a, x));
  }
  if (!rep.trials.empty()) {
    rep.min_worst_error = std::numeric_limits<double>::infinity();
    rep.min_rank = std::numeric_limits<std::size_t>::max();
    for (const SpectralProjectionTrial& t : rep.trials) {
      rep.min_worst_error = std::min(rep.min_worst_error, t.worst_pixel_error);
      rep.max_worst_error = std::max(rep.max_worst_error, t.worst_pixel_error);
      rep.min_rank = std::min(rep.min_rank, t.rank);
      rep.max_rank = std::max(rep.max_rank, t.rank);
    }
  }
  return rep;
}

SolvabilityReport compare_solvability(const Tensor& a, const Tensor& b) {
  const Eigen::MatrixXd am = to_matrix(a);
  if (b.size() != static_cast<std::size_t>(am.rows())) {
    throw ShapeError("target has " + std::to_string(b.size()) + " entries for " +
                     std::to_string(am.rows()) + " rows");
  }
  const Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.raw(), am.rows());
  SolvabilityReport rep;
  rep.rows = static_cast<std::size_t>(am.rows());
  rep.cols = static_cast<std::size_t>(am.cols());

  const Eigen::VectorXd x = am.completeOrthogonalDecomposition().solve(bv);
  rep.standard_residual = (am * x - bv).norm();

  double sq = 0.0;
  for (Eigen::Index i = 0; i < am.rows(); ++i) {
    const double n2 = am.row(i).squaredNorm();
    if (n2 == 0.0) {
      ++rep.zero_rows;
      sq += bv(i) * bv(i);
      continue;
    }
    const Eigen::RowVectorXd xi = am.row(i) * (bv(i) / n2);
    const double e = am.row(i).dot(xi) - bv(i);
    sq += e * e;
  }
  rep.adaptive_residual = std::sqrt(sq);

  Eigen::MatrixXd aug(am.rows(), am.cols() + 1);
  aug << am, bv;
  rep.rank_a = rank_of(am, kRankTolerance);
  rep.rank_augmented = rank_of(aug, kRankTolerance);
  return rep;
}

SolvabilityReport conv_solvability_demo(std::size_t h, std::size_t w, std::size_t k,
                                        std::uint64_t seed) {
  if (h * w <= k * k) throw ConfigError("solvability demo needs H*W > k*k");
  Rng rng(seed);
  const Tensor image = random_uniform(Shape{h, w}, rng);
  const Tensor b = random_uniform(Shape{h * w}, rng);
  return compare_solvability(build_window_matrix(image, k, 2), b);
}

}  // namespace ada3d
