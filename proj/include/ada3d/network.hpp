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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ada3d/ada3d.hpp"
#include "ada3d/metrics.hpp"
#include "ada3d/params.hpp"

namespace ada3d {

enum class Upsampler { kBicubic, kPixelShuffle };

std::string_view to_string(Upsampler u);
Upsampler parse_upsampler(std::string_view name);

/// Architecture of the two-branch fusion network.
struct NetworkConfig {
  std::size_t bands = 8;  // L
  std::size_t spatial_channels = 8;
  std::size_t spectral_channels = 4;
  std::size_t k = 3;
  double alpha = 1.0;
  double beta = 1.0;
  std::size_t resblocks = 2;
  std::size_t ada3d_blocks = 2;
  Upsampler upsampler = Upsampler::kBicubic;
  std::size_t scale = 4;

  /// "toy", "hyperspectral" or "pansharpening"; ConfigError otherwise.
  static NetworkConfig preset(std::string_view name, std::size_t bands);

  Ada3DBlockConfig block_config() const;
  void validate() const;
};

/// One PAN (H x W) / low-resolution (H/4 x W/4 x L) / ground truth (H x W x L) triplet.
struct FusionSample {
  Tensor pan;
  Tensor lr;
  std::optional<Tensor> gt;

  /// Checks the 4x scale relation and band agreement.
  void validate(std::size_t scale = 4) const;
  std::size_t bands() const { return lr.dim(2); }
};

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  std::vector<std::size_t> halve_at;  // epochs after which the rate halves
  double lambda_ergas = 1e-4;
  std::uint64_t seed = 1;
  ErgasMean ergas_mean = ErgasMean::kSquaredMean;
  // Adam moments and epsilon.
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static TrainConfig preset(std::string_view name);
  /// Learning rate used during 1-based `epoch`.
  double learning_rate_at(std::size_t epoch) const;
  void validate() const;
};

/// Halving points every `period` epochs up to `epochs`.
std::vector<std::size_t> halving_every(std::size_t period, std::size_t epochs);

struct ResBlockWeights {
  ConvLayer first;
  ConvLayer second;
};

/// x + conv(relu(conv(x))) with 3x3 convolutions; identity at zero weights.
Var resblock(const Var& x, const ResBlockWeights& w);

/// ERGAS as a differentiable scalar against a constant reference. The value is
/// computed by `ergas()` itself.
Var ergas_loss(const Var& est, const Tensor& ref, double r, ErgasMean convention);

/// mean |est - ref| + lambda_ergas * ERGAS(est, ref).
Var fusion_loss(const Var& est, const Tensor& ref, double lambda_ergas, double r = 4.0,
                ErgasMean convention = ErgasMean::kSquaredMean);

class FusionNet {
 public:
  /// Kaiming-uniform weights, zero biases, deterministic in `seed`.
  FusionNet(const NetworkConfig& cfg, std::uint64_t seed);

  const NetworkConfig& config() const { return cfg_; }
  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  /// Up-sampled spectral image B^U (H x W x L).
  Var upsample(const Var& lr) const;
  /// Fused estimate (H x W x L).
  Var forward(const FusionSample& sample) const;
  /// forward() without graph recording.
  Tensor predict(const FusionSample& sample) const;

  const std::vector<Ada3DBlockWeights>& blocks() const { return blocks_; }

 private:
  NetworkConfig cfg_;
  ParameterSet params_;
  std::optional<ConvLayer> shuffle_conv_;
  ConvLayer head_;
  std::vector<ResBlockWeights> res_;
  ConvLayer spectral_in_;
  std::vector<Ada3DBlockWeights> blocks_;
  ConvLayer spectral_out_;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
};

/// Mini-batch Adam on mean per-sample loss. Sample order is reshuffled each
/// epoch from `cfg.seed`. Throws DivergenceError on a non-finite loss.
TrainResult train(FusionNet& net, const std::vector<FusionSample>& data, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Bicubic up-sampling of the low-resolution input (the usual baseline).
Tensor bicubic_baseline(const FusionSample& sample, std::size_t scale = 4);

}  // namespace ada3d
