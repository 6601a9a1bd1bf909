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

#include "ada3d/ada3d.hpp"
#include "ada3d/conv.hpp"
#include "ada3d/error.hpp"
#include "ada3d/random.hpp"
#include "oracles.hpp"

using namespace ada3d;

namespace {

Ada3DBlockConfig small_config(std::size_t cs, std::size_t cb, std::size_t k) {
  Ada3DBlockConfig cfg;
  cfg.spatial_channels = cs;
  cfg.spectral_channels = cb;
  cfg.k = k;
  return cfg;
}

}  // namespace

TEST_CASE("adaptive convolution matches the eight-loop oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t h = 1 + rng.below(6), w = 1 + rng.below(6), l = 1 + rng.below(6);
    const std::size_t c = 1 + rng.below(4), k = rng.below(2) ? 3 : 1;
    const Tensor fb = random_uniform(Shape{h, w, l, c}, rng);
    const Tensor kern = random_uniform(Shape{h, w, l, c, k, k, k}, rng);
    const Tensor d = random_uniform(Shape{h, w, l, c}, rng);
    const Tensor out = ada3d_apply(Var(fb), Var(kern), Var(d)).value();
    CAPTURE(trial);
    CHECK(max_abs_diff(out, oracle::adaptive_conv(fb, kern, &d)) <= 1e-12);
  }
}

TEST_CASE("position-independent kernels reduce to a flipped depth-wise convolution") {
  Rng rng(32);
  const std::size_t h = 4, w = 5, l = 3, c = 2, k = 3;
  const Tensor fb = random_uniform(Shape{h, w, l, c}, rng);
  const Tensor field = random_uniform(Shape{c, k, k, k}, rng);
  Tensor kern(Shape{h, w, l, c, k, k, k});
  Tensor dw(Shape{k, k, k, 1, c});
  for (std::size_t p = 0; p < h * w * l; ++p)
    for (std::size_t i = 0; i < c * k * k * k; ++i) kern[p * c * k * k * k + i] = field[i];
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        for (std::size_t e = 0; e < k; ++e)
          dw.at({k - 1 - a, k - 1 - b, k - 1 - e, 0, ch}) = field.at({ch, a, b, e});
  const Tensor adaptive = ada3d_apply(Var(fb), Var(kern), Var(Tensor(fb.shape()))).value();
  const Tensor standard = conv3d(Var(fb), conv3d_spec(c, c, k, c, false), Var(dw)).value();
  CHECK(max_abs_diff(adaptive, standard) < 1e-12);
}

TEST_CASE("adaptive convolution gradients") {
  Rng rng(33);
  for (std::size_t k : {1, 3}) {
    Var fb(random_uniform(Shape{3, 3, 4, 2}, rng), true);
    Var kern(random_uniform(Shape{3, 3, 4, 2, k, k, k}, rng), true);
    Var d(random_uniform(Shape{3, 3, 4, 2}, rng), true);
    const Tensor probe = random_uniform(Shape{3, 3, 4, 2}, rng);
    CAPTURE(k);
    CHECK(oracle::gradient_check([&] { return sum(mul(ada3d_apply(fb, kern, d), Var(probe))); },
                                 {fb, kern, d}) < 1e-6);
  }
}

TEST_CASE("adaptive convolution shape checks") {
  const Var fb(Tensor(Shape{2, 2, 2, 2}));
  CHECK_THROWS_AS(ada3d_apply(fb, Var(Tensor(Shape{2, 2, 2, 2, 3, 3, 2})), Var(Tensor(fb.shape()))),
                  ShapeError);
  CHECK_THROWS_AS(ada3d_apply(fb, Var(Tensor(Shape{2, 2, 2, 2, 3, 3, 3})), Var(Tensor(Shape{2, 2, 2, 1}))),
                  ShapeError);
}

TEST_CASE("kernel combination is the spatial-spectral outer product") {
  Rng rng(34);
  const std::size_t h = 2, w = 3, l = 4, c = 2, k = 3;
  Var ka(random_uniform(Shape{h, w, c, k, k, k}, rng), true);
  Var kb(random_uniform(Shape{l, c, k, k, k}, rng), true);
  const Ada3DKernels out = combine_kernels(ka, kb);
  REQUIRE(out.kernels.shape() == Shape{h, w, l, c, k, k, k});
  double worst = 0.0;
  for (std::size_t i = 0; i < h; ++i)
    for (std::size_t j = 0; j < w; ++j)
      for (std::size_t b = 0; b < l; ++b)
        for (std::size_t ch = 0; ch < c; ++ch)
          for (std::size_t o0 = 0; o0 < k; ++o0)
            for (std::size_t o1 = 0; o1 < k; ++o1)
              for (std::size_t o2 = 0; o2 < k; ++o2) {
                const double expect =
                    ka.value().at({i, j, ch, o0, o1, o2}) * kb.value().at({b, ch, o0, o1, o2});
                worst = std::max(worst, std::abs(out.kernels.value().at({i, j, b, ch, o0, o1, o2}) - expect));
              }
  CHECK(worst == 0.0);
  const Tensor probe = random_uniform(out.kernels.shape(), rng);
  CHECK(oracle::gradient_check([&] { return sum(mul(combine_kernels(ka, kb).kernels, Var(probe))); },
                               {ka, kb}) < 1e-6);
  CHECK_THROWS_AS(combine_kernels(ka, Var(Tensor(Shape{l, c + 1, k, k, k}))), ShapeError);
}

TEST_CASE("kernel field normalization") {
  Rng rng(35);
  Var kern(random_uniform(Shape{2, 2, 3, 3, 3, 3}, rng, -2.0, 3.0), true);
  const Tensor n = normalize_kernel_fields(kern).value();
  for (std::size_t f = 0; f < n.size() / 27; ++f) {
    double m = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < 27; ++i) m += n[f * 27 + i];
    m /= 27.0;
    for (std::size_t i = 0; i < 27; ++i) sq += n[f * 27 + i] * n[f * 27 + i];
    CHECK(std::abs(m) < 1e-12);
    CHECK(std::abs(std::sqrt(sq) - 1.0) < 1e-9);
  }
  SUBCASE("degenerate fields become zero") {
    Tensor flat(Shape{2, 2, 2, 2}, 0.7);
    flat[8 + 3] = 1.7;  // second field is not constant
    const Tensor z = normalize_kernel_fields(Var(flat)).value();
    for (std::size_t i = 0; i < 8; ++i) CHECK(z[i] == 0.0);
    CHECK(z[8 + 3] > 0.0);
  }
  SUBCASE("gradient") {
    const Tensor probe = random_uniform(kern.shape(), rng);
    CHECK(oracle::gradient_check([&] { return sum(mul(normalize_kernel_fields(kern), Var(probe))); },
                                 {kern}) < 1e-6);
  }
}

TEST_CASE("bias combination") {
  Rng rng(36);
  Var da(random_uniform(Shape{2, 3}, rng), true);
  Var db(random_uniform(Shape{4}, rng), true);
  Var dc(random_uniform(Shape{2}, rng), true);
  const AdaptiveBiases d = combine_biases(da, db, dc);
  REQUIRE(d.biases.shape() == Shape{2, 3, 4, 2});
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t l = 0; l < 4; ++l)
        for (std::size_t c = 0; c < 2; ++c)
          CHECK(d.biases.value().at({i, j, l, c}) ==
                doctest::Approx(da.value().at({i, j}) * db.value()[l] * dc.value()[c]).epsilon(1e-15));
  const Tensor probe = random_uniform(d.biases.shape(), rng);
  CHECK(oracle::gradient_check([&] { return sum(mul(combine_biases(da, db, dc).biases, Var(probe))); },
                               {da, db, dc}) < 1e-6);
}

TEST_CASE("generator shapes and parameter layout") {
  Rng rng(37);
  ParameterSet ps;
  const Ada3DBlockConfig cfg = small_config(5, 3, 3);
  const Ada3DBlockWeights w = Ada3DBlockWeights::create(cfg, ps, "blk", rng);
  const Var fa(random_uniform(Shape{4, 6, 5}, rng));
  const Var fb(random_uniform(Shape{4, 6, 7, 3}, rng));
  CHECK(generate_spatial_kernels(fa, cfg, w).shape() == Shape{4, 6, 3, 3, 3, 3});
  CHECK(generate_spectral_kernels(fb, cfg, w).shape() == Shape{7, 3, 3, 3, 3});
  const AdaptiveBiases d = generate_biases(fa, fb, cfg, w);
  CHECK(d.biases.shape() == Shape{4, 6, 7, 3});
  CHECK(d.spatial.shape() == Shape{4, 6});
  CHECK(d.spectral.shape() == Shape{7});
  CHECK(d.channel.shape() == Shape{3});
  CHECK(ada3d_block_forward(fa, fb, cfg, w).shape() == fb.shape());
  for (const Var& v : w.kernel_generator_parameters()) CHECK(v.requires_grad());
  CHECK(w.parameters().size() ==
        w.kernel_generator_parameters().size() + w.bias_generator_parameters().size());
  CHECK_THROWS_AS(ada3d_block_forward(fa, Var(Tensor(Shape{4, 6, 7, 2})), cfg, w), ShapeError);
}

TEST_CASE("kernel generator parameters follow the closed form") {
  struct Case {
    std::size_t c, k;
    double alpha, beta;
  };
  for (const Case& cs : {Case{8, 3, 1.0, 1.0}, Case{48, 3, 0.25, 0.25}, Case{4, 1, 1.0, 1.0},
                         Case{6, 3, 0.5, 1.5}}) {
    Rng rng(1);
    ParameterSet ps;
    Ada3DBlockConfig cfg = small_config(cs.c, cs.c, cs.k);
    cfg.alpha = cs.alpha;
    cfg.beta = cs.beta;
    const Ada3DBlockWeights w = Ada3DBlockWeights::create(cfg, ps, "b", rng);
    const double k3 = double(cs.k * cs.k * cs.k);
    const double expect = (9.0 * cs.alpha + 3.0 * cs.beta) * double(cs.c * cs.c) * (k3 + 1.0);
    CAPTURE(cs.c);
    CHECK(double(empirical_param_count(w.kernel_generator_parameters())) == expect);
  }
}

TEST_CASE("block configuration validation") {
  Ada3DBlockConfig cfg = small_config(4, 4, 2);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.k = 3;
  cfg.alpha = 0.1;  // round(0.4) = 0
  CHECK_THROWS_AS(cfg.spatial_hidden(), ConfigError);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("full block gradient against central differences") {
  Rng rng(38);
  ParameterSet ps;
  const Ada3DBlockConfig cfg = small_config(3, 2, 3);
  const Ada3DBlockWeights w = Ada3DBlockWeights::create(cfg, ps, "blk", rng);
  Var fa(random_uniform(Shape{3, 4, 3}, rng), true);
  Var fb(random_uniform(Shape{3, 4, 3, 2}, rng), true);
  const Tensor probe = random_uniform(Shape{3, 4, 3, 2}, rng);
  std::vector<Var> leaves{fa, fb};
  for (const Var& p : w.parameters()) {
    Var q = p;
    // Non-zero biases so the bias-generator path is exercised.
    if (q.shape().size() == 1) q.mutable_value() = random_uniform(q.shape(), rng, 0.2, 1.0);
    leaves.push_back(q);
  }
  const double err = oracle::gradient_check(
      [&] { return sum(mul(ada3d_block_forward(fa, fb, cfg, w), Var(probe))); }, leaves);
  CHECK(err < 1e-6);
}
