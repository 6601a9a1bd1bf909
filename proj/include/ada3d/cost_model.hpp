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
#include <string_view>

namespace ada3d {

enum class Paradigm { kStandard3d, kDepthwise3d, kAda3d };

std::string_view to_string(Paradigm p);
/// "standard3d", "depthwise3d" or "ada3d"; ConfigError otherwise.
Paradigm parse_paradigm(std::string_view name);

struct CostReport {
  Paradigm paradigm = Paradigm::kStandard3d;
  std::uint64_t params = 0;
  std::uint64_t flops = 0;
  double flops_per_param = 0.0;
};

/// Learnable weights of one C -> C layer. For Ada3D only the kernel
/// generators are counted: (9 round(alpha C) + 3 round(beta C)) C (k^3 + 1).
std::uint64_t count_params(Paradigm p, std::uint64_t c, std::uint64_t k, double alpha = 1.0,
                           double beta = 1.0);

/// Two FLOPs per multiply-accumulate over an H x W x L volume.
std::uint64_t count_flops(Paradigm p, std::uint64_t h, std::uint64_t w, std::uint64_t l,
                          std::uint64_t c, std::uint64_t k, double alpha = 1.0,
                          double beta = 1.0);

CostReport cost_report(Paradigm p, std::uint64_t h, std::uint64_t w, std::uint64_t l,
                       std::uint64_t c, std::uint64_t k, double alpha = 1.0, double beta = 1.0);

/// Weights and biases of the Ada3D bias generators (3x3 spatial, 3-tap
/// spectral, 1x1 channel mixer), kept apart from count_params.
std::uint64_t ada3d_bias_generator_params(std::uint64_t spatial_channels,
                                          std::uint64_t spectral_channels);

/// round(mult * c) as used for generator hidden widths; ConfigError if 0.
std::uint64_t hidden_width(double mult, std::uint64_t c);

}  // namespace ada3d
