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


#include "ada3d/cost_model.hpp"

#include <cmath>
#include <string>

#include "ada3d/error.hpp"

namespace ada3d {

std::string_view to_string(Paradigm p) {
  switch (p) {
    case Paradigm::kStandard3d: return "standard3d";
    case Paradigm::kDepthwise3d: return "depthwise3d";
    case Paradigm::kAda3d: return "ada3d";
  }
  return "?";
}

Paradigm parse_paradigm(std::string_view name) {
  if (name == "standard3d") return Paradigm::kStandard3d;
  if (name == "depthwise3d") return Paradigm::kDepthwise3d;
  if (name == "ada3d") return Paradigm::kAda3d;
  throw ConfigError("unknown paradigm '" + std::string(name) + "'");
}

std::uint64_t hidden_width(double mult, std::uint64_t c) {
  if (!(mult > 0.0)) throw ConfigError("width multiplier must be positive");
  const double v = std::round(mult * static_cast<double>(c));
  if (v < 1.0) throw ConfigError("hidden width rounds to zero");
  return static_cast<std::uint64_t>(v);
}

std::uint64_t count_params(Paradigm p, std::uint64_t c, std::uint64_t k, double alpha,
                           double beta) {
  const std::uint64_t k3 = k * k * k;
  switch (p) {
    case Paradigm::kStandard3d: return c * c * k3;
    case Paradigm::kDepthwise3d: return c * k3 + c * c;
    case Paradigm::kAda3d:
      return (9 * hidden_width(alpha, c) + 3 * hidden_width(beta, c)) * c * (k3 + 1);
  }
  return 0;
}

std::uint64_t count_flops(Paradigm p, std::uint64_t h, std::uint64_t w, std::uint64_t l,
                          std::uint64_t c, std::uint64_t k, double alpha, double beta) {
  const std::uint64_t k3 = k * k * k;
  const std::uint64_t vox = h * w * l;
  switch (p) {
    case Paradigm::kStandard3d: return 2 * vox * c * c * k3;
    case Paradigm::kDepthwise3d: return 2 * vox * c * k3 + 2 * vox * c * c;
    case Paradigm::kAda3d:
      return 3 * vox * c * k3 + 18 * hidden_width(alpha, c) * h * w * c * (k3 + 1) +
             6 * hidden_width(beta, c) * l * c * (k3 + 1);
  }
  return 0;
}

CostReport cost_report(Paradigm p, std::uint64_t h, std::uint64_t w, std::uint64_t l,
                       std::uint64_t c, std::uint64_t k, double alpha, double beta) {
  CostReport r;
  r.paradigm = p;
  r.params = count_params(p, c, k, alpha, beta);
  r.flops = count_flops(p, h, w, l, c, k, alpha, beta);
  r.flops_per_param = r.params ? static_cast<double>(r.flops) / static_cast<double>(r.params) : 0.0;
  return r;
}

std::uint64_t ada3d_bias_generator_params(std::uint64_t spatial_channels,
                                          std::uint64_t spectral_channels) {
  const std::uint64_t cs = spatial_channels, cb = spectral_channels;
  return (9 * cs + 1) + (3 * cb + 1) + ((cs + cb) * cb + cb);
}

}  // namespace ada3d
