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

#include "ada3d/ada3d.hpp"
#include "ada3d/cost_model.hpp"
#include "ada3d/error.hpp"
#include "ada3d/random.hpp"

using namespace ada3d;

TEST_CASE("parameter counts for the reference configuration") {
  CHECK(count_params(Paradigm::kStandard3d, 8, 3) == 1728);
  CHECK(count_params(Paradigm::kDepthwise3d, 8, 3) == 280);
  CHECK(count_params(Paradigm::kAda3d, 8, 3) == 21504);
  CHECK(ada3d_bias_generator_params(8, 8) == 234);
}

TEST_CASE("flop counts by hand") {
  // H = W = 4, L = 2, C = 2, k = 1: V = 32
  CHECK(count_flops(Paradigm::kStandard3d, 4, 4, 2, 2, 1) == 2 * 32 * 4);
  CHECK(count_flops(Paradigm::kDepthwise3d, 4, 4, 2, 2, 1) == 2 * 32 * 2 + 2 * 32 * 4);
  // 3*32*2 + 18*2*16*2*2 + 6*2*2*2*2
  CHECK(count_flops(Paradigm::kAda3d, 4, 4, 2, 2, 1) == 192 + 2304 + 96);
}

TEST_CASE("k = 1 collapses") {
  for (std::uint64_t c = 1; c <= 6; ++c) {
    CHECK(count_params(Paradigm::kStandard3d, c, 1) == c * c);
    CHECK(count_params(Paradigm::kDepthwise3d, c, 1) == c + c * c);
    CHECK(count_params(Paradigm::kAda3d, c, 1) == 24 * c * c);
  }
}

TEST_CASE("standard convolution does 2HWL flops per parameter") {
  Rng rng(71);
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t h = 1 + rng.below(64), w = 1 + rng.below(64),
                        l = 1 + rng.below(32), c = 1 + rng.below(16),
                        k = 1 + 2 * rng.below(3);
    const CostReport r = cost_report(Paradigm::kStandard3d, h, w, l, c, k);
    CHECK(r.flops_per_param == static_cast<double>(2 * h * w * l));
  }
}

TEST_CASE("monotone in channels and kernel size") {
  for (Paradigm p : {Paradigm::kStandard3d, Paradigm::kDepthwise3d, Paradigm::kAda3d}) {
    CHECK(count_params(p, 8, 3) < count_params(p, 9, 3));
    CHECK(count_params(p, 8, 3) < count_params(p, 8, 5));
    CHECK(count_flops(p, 8, 8, 4, 8, 3) < count_flops(p, 8, 9, 4, 8, 3));
  }
}

TEST_CASE("closed forms agree with instantiated blocks") {
  for (auto [c, k, a, b] : {std::tuple{8ul, 3ul, 1.0, 1.0}, std::tuple{6ul, 3ul, 0.5, 1.5},
                            std::tuple{4ul, 1ul, 1.0, 1.0}}) {
    Ada3DBlockConfig cfg;
    cfg.spatial_channels = c;
    cfg.spectral_channels = c;
    cfg.k = k;
    cfg.alpha = a;
    cfg.beta = b;
    ParameterSet ps;
    Rng rng(72);
    const Ada3DBlockWeights w = Ada3DBlockWeights::create(cfg, ps, "b", rng);
    CHECK(empirical_param_count(w.kernel_generator_parameters()) == count_params(Paradigm::kAda3d, c, k, a, b));
    CHECK(empirical_param_count(w.bias_generator_parameters()) == ada3d_bias_generator_params(c, c));
  }
}

TEST_CASE("names and errors") {
  CHECK(parse_paradigm("ada3d") == Paradigm::kAda3d);
  CHECK(to_string(Paradigm::kDepthwise3d) == "depthwise3d");
  CHECK_THROWS_AS(parse_paradigm("conv4d"), ConfigError);
  CHECK_THROWS_AS(hidden_width(0.0, 8), ConfigError);
  CHECK_THROWS_AS(hidden_width(0.01, 8), ConfigError);
  CHECK(hidden_width(0.25, 48) == 12);
}
