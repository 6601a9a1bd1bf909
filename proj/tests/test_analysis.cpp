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


#include <doctest.h>

#include <cmath>

#include "ada3d/analysis.hpp"
#include "ada3d/error.hpp"
#include "ada3d/random.hpp"
#include "oracles.hpp"

using namespace ada3d;

TEST_CASE("matrix rank against Gaussian elimination") {
  Tensor eye(Shape{5, 5});
  for (std::size_t i = 0; i < 5; ++i) eye.at({i, i}) = 1.0;
  CHECK(matrix_rank(eye) == 5);

  Rng rng(61);
  const Tensor u = random_uniform(Shape{6}, rng), v = random_uniform(Shape{4}, rng);
  Tensor outer(Shape{6, 4});
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 4; ++j) outer.at({i, j}) = u[i] * v[j];
  CHECK(matrix_rank(outer) == 1);

  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 3 + rng.below(6), cols = 2 + rng.below(6);
    Tensor m = random_uniform(Shape{rows, cols}, rng);
    // duplicate a column to force deficiency
    for (std::size_t i = 0; i < rows; ++i) m.at({i, cols - 1}) = m.at({i, 0});
    CHECK(matrix_rank(m) == oracle::rank(oracle::rows_of(m)));
  }
  CHECK(matrix_rank(Tensor(Shape{3, 3})) == 0);
  CHECK_THROWS_AS(matrix_rank(eye, 0.0), ConfigError);
}

TEST_CASE("window matrix") {
  Rng rng(62);
  const Tensor x = random_uniform(Shape{4, 5, 2}, rng);
  const Tensor k1 = build_window_matrix(x, 1);
  CHECK(k1.shape() == Shape{20, 2});
  CHECK(k1.reshaped(x.shape()) == x);

  const Tensor k3 = build_window_matrix(x, 3);
  CHECK(k3.shape() == Shape{20, 18});
  // interior pixel (1, 1): column t*C + c holds x(p - o_t, c)
  const std::size_t row = 1 * 5 + 1;
  std::size_t t = 0;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b, ++t)
      for (std::size_t c = 0; c < 2; ++c)
        CHECK(k3.at({row, t * 2 + c}) ==
              x.at({static_cast<std::size_t>(1 - a), static_cast<std::size_t>(1 - b), c}));
  // corner (0, 0): offsets pointing outside read zero
  CHECK(k3.at({0, 0}) == x.at({1, 1, 0}));
  CHECK(k3.at({0, 8 * 2}) == 0.0);

  const Tensor flat(Shape{3, 3}, 1.0);
  const Tensor kc = build_window_matrix(flat, 3);
  CHECK(kc.shape() == Shape{9, 9});
  CHECK(kc.at({4, 0}) == 1.0);
  CHECK_THROWS_AS(build_window_matrix(x, 2), ConfigError);
}

TEST_CASE("least-squares residual matches the normal equations") {
  Rng rng(63);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor a = random_uniform(Shape{12, 4}, rng);
    const Tensor b = random_uniform(Shape{12}, rng);
    const SolvabilityReport r = compare_solvability(a, b);
    const std::vector<double> bv(b.data().begin(), b.data().end());
    CHECK(r.standard_residual == doctest::Approx(oracle::least_squares_residual(a, bv)).epsilon(1e-8));
    CHECK(r.adaptive_residual < 1e-12);
    CHECK(r.rank_a == 4);
    CHECK(r.rank_augmented == 5);
  }
}

TEST_CASE("consistent systems are solved by both") {
  Rng rng(64);
  const Tensor a = random_uniform(Shape{10, 3}, rng);
  const Tensor x0 = random_uniform(Shape{3}, rng);
  Tensor b(Shape{10});
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 3; ++j) b[i] += a.at({i, j}) * x0[j];
  const SolvabilityReport r = compare_solvability(a, b);
  CHECK(r.standard_residual <= 1e-9);
  CHECK(r.rank_augmented == r.rank_a);
}

TEST_CASE("zero rows leave the adaptive residual at |b_i|") {
  Tensor a(Shape{3, 2});
  a.at({0, 0}) = 1.0;
  a.at({2, 1}) = 2.0;
  const Tensor b(Shape{3}, std::vector<double>{1.0, 0.5, 3.0});
  const SolvabilityReport r = compare_solvability(a, b);
  CHECK(r.zero_rows == 1);
  CHECK(r.adaptive_residual == doctest::Approx(0.5));
  CHECK(r.standard_residual == doctest::Approx(0.5));
}

TEST_CASE("convolutional solvability demo") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SolvabilityReport r = conv_solvability_demo(8, 8, 3, seed);
    CHECK(r.rows == 64);
    CHECK(r.cols == 9);
    CHECK(r.standard_residual > 1e-3);
    CHECK(r.adaptive_residual <= 1e-10);
  }
  CHECK_THROWS_AS(conv_solvability_demo(3, 3, 3, 1), ConfigError);
}

TEST_CASE("spectral projection demo") {
  const SpectralProjectionReport full = spectral_projection_demo(6, 6, 5, 3);
  CHECK(full.min_rank == 6);
  CHECK(full.max_worst_error < 1e-8);

  const SpectralProjectionReport low = spectral_projection_demo(8, 4, 20, 3);
  CHECK(low.trials.size() == 20);
  CHECK(low.min_rank == 4);
  CHECK(low.max_rank == 4);
  CHECK(low.min_worst_error > 0.0);

  const SpectralProjectionReport one_short = spectral_projection_demo(5, 4, 10, 7);
  CHECK(one_short.max_rank == 4);
  CHECK(one_short.min_worst_error > 1e-6);

  // identity projector reproduces X
  Tensor eye(Shape{3, 3});
  for (std::size_t i = 0; i < 3; ++i) eye.at({i, i}) = 1.0;
  Rng rng(65);
  const SpectralProjectionTrial t = spectral_projection_trial(eye, random_uniform(Shape{3, 7}, rng));
  CHECK(t.rank == 3);
  CHECK(t.worst_pixel_error < 1e-14);
}
