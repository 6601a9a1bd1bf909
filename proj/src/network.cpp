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

#include "ada3d/network.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <utility>

#include "ada3d/conv.hpp"
#include "ada3d/error.hpp"

namespace ada3d {

std::string_view to_string(Upsampler u) {
  return u == Upsampler::kBicubic ? "bicubic" : "pixelshuffle";
}

Upsampler parse_upsampler(std::string_view name) {
  if (name == "bicubic") return Upsampler::kBicubic;
  if (name == "pixelshuffle") return Upsampler::kPixelShuffle;
  throw ConfigError("unknown upsampler '" + std::string(name) + "'");
}

NetworkConfig NetworkConfig::preset(std::string_view name, std::size_t bands) {
  NetworkConfig c;
  c.bands = bands;
  if (name == "toy") {
    // defaults
  } else if (name == "hyperspectral") {
    c.spatial_channels = 32;
    c.spectral_channels = 8;
    c.resblocks = 3;
    c.ada3d_blocks = 6;
  } else if (name == "pansharpening") {
    c.spatial_channels = 48;
    c.spectral_channels = 48;
    c.alpha = 0.25;
    c.beta = 0.25;
    c.resblocks = 4;
    c.ada3d_blocks = 8;
    c.upsampler = Upsampler::kPixelShuffle;
  } else {
    throw ConfigError("unknown network preset '" + std::string(name) + "'");
  }
  return c;
}

Ada3DBlockConfig NetworkConfig::block_config() const {
  Ada3DBlockConfig b;
  b.spatial_channels = spatial_channels;
  b.spectral_channels = spectral_channels;
  b.k = k;
  b.alpha = alpha;
  b.beta = beta;
  return b;
}

void NetworkConfig::validate() const {
  if (scale != 4) throw ConfigError("up-sampling scale must be 4");
  if (bands == 0) throw ConfigError("bands must be >= 1");
  block_config().validate();
}

void FusionSample::validate(std::size_t scale) const {
  if (pan.order() != 2 || lr.order() != 3) {
    throw ShapeError("sample needs PAN H x W and LR h x w x L, got " + to_string(pan.shape()) +
                     " and " + to_string(lr.shape()));
  }
  if (pan.dim(0) != lr.dim(0) * scale || pan.dim(1) != lr.dim(1) * scale) {
    throw ShapeError("PAN " + to_string(pan.shape()) + " is not " + std::to_string(scale) +
                     "x the LR extent " + to_string(lr.shape()));
  }
  if (gt && gt->shape() != Shape{pan.dim(0), pan.dim(1), lr.dim(2)}) {
    throw ShapeError("GT " + to_string(gt->shape()) + " does not match PAN/LR");
  }
}

TrainConfig TrainConfig::preset(std::string_view name) {
  TrainConfig t;
  if (name == "toy") {
    t.epochs = 200;
    t.batch_size = 1;
    t.learning_rate = 1e-3;
    t.halve_at = halving_every(100, t.epochs);
  } else if (name == "hyperspectral") {
    t.epochs = 1200;
    t.batch_size = 4;
    t.learning_rate = 5e-4;
    t.halve_at = halving_every(250, t.epochs);
  } else if (name == "pansharpening") {
    t.epochs = 500;
    t.batch_size = 8;
    t.learning_rate = 1e-4;
    t.halve_at = {300};
  } else {
    throw ConfigError("unknown training preset '" + std::string(name) + "'");
  }
  return t;
}

double TrainConfig::learning_rate_at(std::size_t epoch) const {
  double lr = learning_rate;
  for (std::size_t h : halve_at) {
    if (h < epoch) lr *= 0.5;
  }
  return lr;
}

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) throw ConfigError("epochs and batch size must be >= 1");
  if (learning_rate < 0.0) throw ConfigError("learning rate must be non-negative");
  if (lambda_ergas < 0.0) throw ConfigError("lambda_ergas must be non-negative");
}

std::vector<std::size_t> halving_every(std::size_t period, std::size_t epochs) {
  std::vector<std::size_t> out;
  if (period == 0) return out;
  for (std::size_t e = period; e < epochs; e += period) out.push_back(e);
  return out;
}

Var resblock(const Var& x, const ResBlockWeights& w) {
  const Var a = relu(conv2d(x, w.first.spec, w.first.weight, w.first.bias));
  return add(x, conv2d(a, w.second.spec, w.second.weight, w.second.bias));
}

Var ergas_loss(const Var& est, const Tensor& ref, double r, ErgasMean convention) {
  const double value = ergas(est.value(), ref, r, convention).value;
  auto reference = std::make_shared<Tensor>(ref);
  return make_op("ergas", Tensor::scalar(value), {est},
                 [reference, r, convention, value](Node& n) {
                   if (value == 0.0) return;  // sqrt is not differentiable at 0
                   const Tensor& est_v = n.parents[0]->value;
                   const Tensor& ref_v = *reference;
                   const std::size_t l = ref_v.dim(2), pixels = ref_v.dim(0) * ref_v.dim(1);
                   std::vector<double> mu2(l, 0.0);
                   for (std::size_t p = 0; p < pixels; ++p) {
                     for (std::size_t b = 0; b < l; ++b) {
                       const double v = ref_v[p * l + b];
                       mu2[b] += convention == ErgasMean::kMeanSquare ? v * v : v;
                     }
                   }
                   for (double& m : mu2) {
                     m /= static_cast<double>(pixels);
                     if (convention == ErgasMean::kSquaredMean) m = m * m;
                     if (m < kErgasEpsilon) m = kErgasEpsilon;
                   }
                   // E = (100/r) sqrt(S);  dE/de = (100/r)^2 e / (E L n mu2)
                   const double c = (100.0 / r) * (100.0 / r) / value * n.grad[0] /
                                    (static_cast<double>(l) * static_cast<double>(pixels));
                   Tensor& g = n.parents[0]->grad_buffer();
                   for (std::size_t p = 0; p < pixels; ++p) {
                     for (std::size_t b = 0; b < l; ++b) {
                       const std::size_t i = p * l + b;
                       g[i] += c * (est_v[i] - ref_v[i]) / mu2[b];
                     }
                   }
                 });
}

Var fusion_loss(const Var& est, const Tensor& ref, double lambda_ergas, double r,
                ErgasMean convention) {
  if (est.shape() != ref.shape()) {
    throw ShapeError("loss: estimate " + to_string(est.shape()) + " vs reference " +
                     to_string(ref.shape()));
  }
  const Var l1 = mean(abs(sub(est, Var(ref))));
  if (lambda_ergas == 0.0) return l1;
  return add(l1, scale(ergas_loss(est, ref, r, convention), lambda_ergas));
}

FusionNet::FusionNet(const NetworkConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  const std::size_t l = cfg_.bands, r = cfg_.scale;
  if (cfg_.upsampler == Upsampler::kPixelShuffle) {
    shuffle_conv_ = ConvLayer::create(conv2d_spec(l, r * r * l, 3), params_, "upsample", rng);
  }
  head_ = ConvLayer::create(conv2d_spec(l + 1, cfg_.spatial_channels, 3), params_, "head", rng);
  for (std::size_t i = 0; i < cfg_.resblocks; ++i) {
    const std::string p = "res" + std::to_string(i);
    const ConvSpec s = conv2d_spec(cfg_.spatial_channels, cfg_.spatial_channels, 3);
    ResBlockWeights rb;
    rb.first = ConvLayer::create(s, params_, p + ".first", rng);
    rb.second = ConvLayer::create(s, params_, p + ".second", rng);
    res_.push_back(std::move(rb));
  }
  spectral_in_ =
      ConvLayer::create(conv3d_spec(1, cfg_.spectral_channels, 3), params_, "spectral_in", rng);
  const Ada3DBlockConfig bc = cfg_.block_config();
  for (std::size_t i = 0; i < cfg_.ada3d_blocks; ++i) {
    blocks_.push_back(Ada3DBlockWeights::create(bc, params_, "ada" + std::to_string(i), rng));
  }
  spectral_out_ =
      ConvLayer::create(conv3d_spec(cfg_.spectral_channels, 1, 3), params_, "spectral_out", rng);
}

Var FusionNet::upsample(const Var& lr) const {
  if (cfg_.upsampler == Upsampler::kBicubic) return bicubic_upsample(lr, cfg_.scale);
  return pixel_shuffle_upsample(lr, cfg_.scale, shuffle_conv_->weight, shuffle_conv_->bias);
}

Var FusionNet::forward(const FusionSample& sample) const {
  sample.validate(cfg_.scale);
  if (sample.bands() != cfg_.bands) {
    throw ShapeError("sample has " + std::to_string(sample.bands()) + " bands, network expects " +
                     std::to_string(cfg_.bands));
  }
  const std::size_t h = sample.pan.dim(0), w = sample.pan.dim(1), l = cfg_.bands;
  const Var bu = upsample(Var(sample.lr));
  const Var pan(sample.pan.reshaped(Shape{h, w, 1}));

  const Var fa0 = conv2d(concat_last({pan, bu}), head_.spec, head_.weight, head_.bias);
  std::vector<Var> stages;
  Var x = fa0;
  for (const ResBlockWeights& rb : res_) {
    x = resblock(x, rb);
    stages.push_back(x);
  }

  Var fb = conv3d(reshape(bu, Shape{h, w, l, 1}), spectral_in_.spec, spectral_in_.weight,
                  spectral_in_.bias);
  const Ada3DBlockConfig bc = cfg_.block_config();
  for (std::size_t t = 0; t < blocks_.size(); ++t) {
    const Var& fa = stages.empty() ? fa0 : stages[t % stages.size()];
    fb = ada3d_block_forward(fa, fb, bc, blocks_[t]);
  }
  const Var detail = conv3d(fb, spectral_out_.spec, spectral_out_.weight, spectral_out_.bias);
  return add(reshape(detail, Shape{h, w, l}), bu);
}

Tensor FusionNet::predict(const FusionSample& sample) const {
  NoGradGuard guard;
  return forward(sample).value();
}

TrainResult train(FusionNet& net, const std::vector<FusionSample>& data, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  if (data.empty()) throw ConfigError("train: empty dataset");
  for (const FusionSample& s : data) {
    if (!s.gt) throw ConfigError("train: every sample needs a ground truth");
  }
  const auto& entries = net.parameters().entries();
  std::vector<Tensor> m, v;
  for (const auto& entry : entries) {
    m.emplace_back(entry.second.shape());
    v.emplace_back(entry.second.shape());
  }
  Rng rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::size_t step = 0;
  const double scale_ratio = static_cast<double>(net.config().scale);
  TrainResult result;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.below(i)]);
    }
    const double lr = cfg.learning_rate_at(epoch);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      const double weight = 1.0 / static_cast<double>(stop - start);
      net.parameters().zero_grad();
      for (std::size_t b = start; b < stop; ++b) {
        const FusionSample& s = data[order[b]];
        const Var loss =
            fusion_loss(net.forward(s), *s.gt, cfg.lambda_ergas, scale_ratio, cfg.ergas_mean);
        const double value = loss.value()[0];
        if (!std::isfinite(value)) {
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch) +
                                ", sample " + std::to_string(order[b]));
        }
        epoch_loss += value;
        backward(loss, weight);
      }
      ++step;
      const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      for (std::size_t pi = 0; pi < entries.size(); ++pi) {
        Var param = entries[pi].second;
        if (!param.has_grad()) continue;
        const Tensor g = param.grad();
        Tensor& val = param.mutable_value();
        for (std::size_t i = 0; i < val.size(); ++i) {
          m[pi][i] = cfg.beta1 * m[pi][i] + (1.0 - cfg.beta1) * g[i];
          v[pi][i] = cfg.beta2 * v[pi][i] + (1.0 - cfg.beta2) * g[i] * g[i];
          const double mhat = m[pi][i] / c1;
          const double vhat = v[pi][i] / c2;
          val[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
      }
    }
    const EpochRecord rec{epoch, epoch_loss / static_cast<double>(data.size()), lr};
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  net.parameters().zero_grad();
  return result;
}

Tensor bicubic_baseline(const FusionSample& sample, std::size_t scale) {
  NoGradGuard guard;
  return bicubic_upsample(Var(sample.lr), scale).value();
}

}  // namespace ada3d
