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


#include "ada3d/ada3d.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "ada3d/error.hpp"
#include "ada3d/simd/kernels.hpp"

namespace ada3d {
namespace {

std::size_t rounded_width(double mult, std::size_t channels, const char* name) {
  if (!(mult > 0.0)) throw ConfigError(std::string(name) + " must be positive");
  const double w = std::round(mult * static_cast<double>(channels));
  if (w < 1.0) {
    throw ConfigError(std::string(name) + " * C_spec rounds to 0 hidden channels");
  }
  return static_cast<std::size_t>(w);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

}  // namespace

std::size_t Ada3DBlockConfig::spatial_hidden() const {
  return rounded_width(alpha, spectral_channels, "alpha");
}

std::size_t Ada3DBlockConfig::spectral_hidden() const {
  return rounded_width(beta, spectral_channels, "beta");
}

void Ada3DBlockConfig::validate() const {
  if (spatial_channels == 0 || spectral_channels == 0) {
    throw ConfigError("Ada3D block channel counts must be >= 1");
  }
  if (k % 2 == 0) throw ConfigError("Ada3D kernel extent must be odd");
  spatial_hidden();
  spectral_hidden();
}

Ada3DBlockWeights Ada3DBlockWeights::create(const Ada3DBlockConfig& cfg, ParameterSet& params,
                                            const std::string& prefix, Rng& rng) {
  cfg.validate();
  const std::size_t cs = cfg.spatial_channels, cb = cfg.spectral_channels;
  const std::size_t ck3 = cb * cfg.field_size();
  Ada3DBlockWeights w;
  w.spatial_gen1 = ConvLayer::create(conv2d_spec(cs, cfg.spatial_hidden(), 3, 1, false), params,
                                     prefix + ".spatial_gen1", rng);
  w.spatial_gen2 = ConvLayer::create(conv2d_spec(cfg.spatial_hidden(), ck3, 3, 1, false), params,
                                     prefix + ".spatial_gen2", rng);
  w.spectral_gen1 = ConvLayer::create(conv1d_spec(cb, cfg.spectral_hidden(), 3, 1, false), params,
                                      prefix + ".spectral_gen1", rng);
  w.spectral_gen2 = ConvLayer::create(conv1d_spec(cfg.spectral_hidden(), ck3, 3, 1, false),
                                      params, prefix + ".spectral_gen2", rng);
  w.bias_spatial =
      ConvLayer::create(conv2d_spec(cs, 1, 3), params, prefix + ".bias_spatial", rng);
  w.bias_spectral =
      ConvLayer::create(conv1d_spec(cb, 1, 3), params, prefix + ".bias_spectral", rng);
  w.bias_channel =
      ConvLayer::create(conv1d_spec(cs + cb, cb, 1), params, prefix + ".bias_channel", rng);
  return w;
}

std::vector<Var> Ada3DBlockWeights::kernel_generator_parameters() const {
  std::vector<Var> out;
  for (const ConvLayer* l : {&spatial_gen1, &spatial_gen2, &spectral_gen1, &spectral_gen2}) {
    for (const Var& v : l->parameters()) out.push_back(v);
  }
  return out;
}

std::vector<Var> Ada3DBlockWeights::bias_generator_parameters() const {
  std::vector<Var> out;
  for (const ConvLayer* l : {&bias_spatial, &bias_spectral, &bias_channel}) {
    for (const Var& v : l->parameters()) out.push_back(v);
  }
  return out;
}

std::vector<Var> Ada3DBlockWeights::parameters() const {
  std::vector<Var> out = kernel_generator_parameters();
  for (const Var& v : bias_generator_parameters()) out.push_back(v);
  return out;
}

Var generate_spatial_kernels(const Var& fa, const Ada3DBlockConfig& cfg,
                             const Ada3DBlockWeights& w) {
  require(fa.value().order() == 3 && fa.shape()[2] == cfg.spatial_channels,
          "spatial kernel generator expects H x W x " + std::to_string(cfg.spatial_channels) +
              ", got " + to_string(fa.shape()));
  const Var hidden = conv2d(fa, w.spatial_gen1.spec, w.spatial_gen1.weight, w.spatial_gen1.bias);
  const Var out = conv2d(hidden, w.spatial_gen2.spec, w.spatial_gen2.weight, w.spatial_gen2.bias);
  const std::size_t k = cfg.k;
  return reshape(out, Shape{fa.shape()[0], fa.shape()[1], cfg.spectral_channels, k, k, k});
}

Var generate_spectral_kernels(const Var& fb, const Ada3DBlockConfig& cfg,
                              const Ada3DBlockWeights& w) {
  require(fb.value().order() == 4 && fb.shape()[3] == cfg.spectral_channels,
          "spectral kernel generator expects H x W x L x " +
              std::to_string(cfg.spectral_channels) + ", got " + to_string(fb.shape()));
  const Var pooled = global_avg_pool_spatial(fb);  // L x C
  const Var hidden =
      conv1d(pooled, w.spectral_gen1.spec, w.spectral_gen1.weight, w.spectral_gen1.bias);
  const Var out =
      conv1d(hidden, w.spectral_gen2.spec, w.spectral_gen2.weight, w.spectral_gen2.bias);
  const std::size_t k = cfg.k;
  return reshape(out, Shape{fb.shape()[2], cfg.spectral_channels, k, k, k});
}

Ada3DKernels combine_kernels(const Var& spatial, const Var& spectral) {
  const Shape& sa = spatial.shape();
  const Shape& sb = spectral.shape();
  require(sa.size() == 6 && sb.size() == 5,
          "combine_kernels: expected H x W x C x k^3 and L x C x k^3 factors");
  require(sa[2] == sb[1] && sa[3] == sb[2] && sa[4] == sb[3] && sa[5] == sb[4],
          "combine_kernels: factor shapes " + to_string(sa) + " and " + to_string(sb) +
              " disagree on C or k");
  const std::size_t hw = sa[0] * sa[1], l = sb[0], c = sa[2];
  const std::size_t k3 = sa[3] * sa[4] * sa[5];
  const std::size_t ck3 = c * k3;
  Tensor out(Shape{sa[0], sa[1], l, c, sa[3], sa[4], sa[5]});
  const double* ka = spatial.value().raw();
  const double* kb = spectral.value().raw();
  double* o = out.raw();
  for (std::size_t p = 0; p < hw; ++p) {
    for (std::size_t b = 0; b < l; ++b) {
      double* dst = o + (p * l + b) * ck3;
      const double* a = ka + p * ck3;
      const double* s = kb + b * ck3;
      for (std::size_t i = 0; i < ck3; ++i) dst[i] = a[i] * s[i];
    }
  }
  Var k = make_op("combine_kernels", std::move(out), {spatial, spectral},
                  [hw, l, ck3](Node& n) {
                    const double* g = n.grad.raw();
                    const double* a = n.parents[0]->value.raw();
                    const double* s = n.parents[1]->value.raw();
                    double* ga = n.parents[0]->requires_grad
                                     ? n.parents[0]->grad_buffer().raw()
                                     : nullptr;
                    double* gs = n.parents[1]->requires_grad
                                     ? n.parents[1]->grad_buffer().raw()
                                     : nullptr;
                    for (std::size_t p = 0; p < hw; ++p) {
                      for (std::size_t b = 0; b < l; ++b) {
                        const double* gr = g + (p * l + b) * ck3;
                        if (ga) {
                          for (std::size_t i = 0; i < ck3; ++i) ga[p * ck3 + i] += gr[i] * s[b * ck3 + i];
                        }
                        if (gs) {
                          for (std::size_t i = 0; i < ck3; ++i) gs[b * ck3 + i] += gr[i] * a[p * ck3 + i];
                        }
                      }
                    }
                  });
  return Ada3DKernels{k, spatial, spectral};
}

Var normalize_kernel_fields(const Var& kernels) {
  const Shape& s = kernels.shape();
  require(s.size() >= 3, "normalize_kernel_fields: need trailing k x k x k axes");
  const std::size_t field = s[s.size() - 1] * s[s.size() - 2] * s[s.size() - 3];
  const std::size_t fields = kernels.value().size() / field;
  Tensor out(s);
  auto inv_norms = std::make_shared<std::vector<double>>(fields, 0.0);
  const double* x = kernels.value().raw();
  double* y = out.raw();
  for (std::size_t f = 0; f < fields; ++f) {
    const double* xf = x + f * field;
    double* yf = y + f * field;
    double m = 0.0;
    for (std::size_t i = 0; i < field; ++i) m += xf[i];
    m /= static_cast<double>(field);
    double ss = 0.0;
    for (std::size_t i = 0; i < field; ++i) {
      yf[i] = xf[i] - m;
      ss += yf[i] * yf[i];
    }
    const double norm = std::sqrt(ss);
    if (norm < kFieldNormEpsilon) {
      for (std::size_t i = 0; i < field; ++i) yf[i] = 0.0;
      continue;
    }
    const double inv = 1.0 / norm;
    (*inv_norms)[f] = inv;
    for (std::size_t i = 0; i < field; ++i) yf[i] *= inv;
  }
  return make_op("normalize_kernel_fields", std::move(out), {kernels},
                 [field, fields, inv_norms](Node& n) {
                   // y = z / |z|, z = x - mean(x):
                   // dz = (dy - y <y, dy>) / |z|, dx = dz - mean(dz)
                   double* gx = n.parents[0]->grad_buffer().raw();
                   const double* y = n.value.raw();
                   const double* gy = n.grad.raw();
                   std::vector<double> dz(field);
                   for (std::size_t f = 0; f < fields; ++f) {
                     const double inv = (*inv_norms)[f];
                     if (inv == 0.0) continue;
                     const double* yf = y + f * field;
                     const double* gyf = gy + f * field;
                     double dot = 0.0;
                     for (std::size_t i = 0; i < field; ++i) dot += yf[i] * gyf[i];
                     double mean_dz = 0.0;
                     for (std::size_t i = 0; i < field; ++i) {
                       dz[i] = (gyf[i] - yf[i] * dot) * inv;
                       mean_dz += dz[i];
                     }
                     mean_dz /= static_cast<double>(field);
                     double* gxf = gx + f * field;
                     for (std::size_t i = 0; i < field; ++i) gxf[i] += dz[i] - mean_dz;
                   }
                 });
}

AdaptiveBiases combine_biases(const Var& spatial, const Var& spectral, const Var& channel) {
  require(spatial.value().order() == 2 && spectral.value().order() == 1 &&
              channel.value().order() == 1,
          "combine_biases: expected H x W, L and C factors");
  const std::size_t h = spatial.shape()[0], w = spatial.shape()[1];
  const std::size_t l = spectral.shape()[0], c = channel.shape()[0];
  Tensor out(Shape{h, w, l, c});
  const double* da = spatial.value().raw();
  const double* db = spectral.value().raw();
  const double* dc = channel.value().raw();
  for (std::size_t p = 0; p < h * w; ++p) {
    for (std::size_t b = 0; b < l; ++b) {
      const double ab = da[p] * db[b];
      double* dst = out.raw() + (p * l + b) * c;
      for (std::size_t ch = 0; ch < c; ++ch) dst[ch] = ab * dc[ch];
    }
  }
  const std::size_t hw = h * w;
  Var d = make_op("combine_biases", std::move(out), {spatial, spectral, channel},
                  [hw, l, c](Node& n) {
                    const double* g = n.grad.raw();
                    const double* da = n.parents[0]->value.raw();
                    const double* db = n.parents[1]->value.raw();
                    const double* dc = n.parents[2]->value.raw();
                    double* ga = n.parents[0]->requires_grad ? n.parents[0]->grad_buffer().raw() : nullptr;
                    double* gb = n.parents[1]->requires_grad ? n.parents[1]->grad_buffer().raw() : nullptr;
                    double* gc = n.parents[2]->requires_grad ? n.parents[2]->grad_buffer().raw() : nullptr;
                    for (std::size_t p = 0; p < hw; ++p) {
                      for (std::size_t b = 0; b < l; ++b) {
                        const double* gr = g + (p * l + b) * c;
                        double dot_c = 0.0;
                        for (std::size_t ch = 0; ch < c; ++ch) dot_c += gr[ch] * dc[ch];
                        if (ga) ga[p] += dot_c * db[b];
                        if (gb) gb[b] += dot_c * da[p];
                        if (gc) {
                          const double ab = da[p] * db[b];
                          for (std::size_t ch = 0; ch < c; ++ch) gc[ch] += gr[ch] * ab;
                        }
                      }
                    }
                  });
  return AdaptiveBiases{d, spatial, spectral, channel};
}

AdaptiveBiases generate_biases(const Var& fa, const Var& fb, const Ada3DBlockConfig& cfg,
                               const Ada3DBlockWeights& w) {
  require(fa.value().order() == 3 && fa.shape()[2] == cfg.spatial_channels,
          "bias generator: spatial features " + to_string(fa.shape()));
  require(fb.value().order() == 4 && fb.shape()[3] == cfg.spectral_channels &&
              fb.shape()[0] == fa.shape()[0] && fb.shape()[1] == fa.shape()[1],
          "bias generator: spectral features " + to_string(fb.shape()) + " vs spatial " +
              to_string(fa.shape()));
  const std::size_t h = fa.shape()[0], wd = fa.shape()[1], l = fb.shape()[2];
  const std::size_t cs = cfg.spatial_channels, cb = cfg.spectral_channels;

  const Var da = reshape(
      conv2d(fa, w.bias_spatial.spec, w.bias_spatial.weight, w.bias_spatial.bias), Shape{h, wd});

  const Var pooled_b = global_avg_pool_spatial(fb);  // L x C_spec
  const Var db = reshape(
      conv1d(pooled_b, w.bias_spectral.spec, w.bias_spectral.weight, w.bias_spectral.bias),
      Shape{l});

  const Var pooled_a = global_avg_pool_spatial(fa);                                  // C_spat
  const Var pooled_bb = global_avg_pool_spatial(reshape(pooled_b, Shape{l, 1, cb}));  // C_spec
  const Var joint = reshape(concat_last({pooled_a, pooled_bb}), Shape{1, cs + cb});
  const Var dc = reshape(
      conv1d(joint, w.bias_channel.spec, w.bias_channel.weight, w.bias_channel.bias), Shape{cb});

  return combine_biases(da, db, dc);
}

Var ada3d_apply(const Var& fb, const Var& kernels, const Var& biases) {
  const Shape& s = fb.shape();
  require(s.size() == 4, "ada3d_apply: Fb must be H x W x L x C, got " + to_string(s));
  const Shape& ks = kernels.shape();
  require(ks.size() == 7 && ks[0] == s[0] && ks[1] == s[1] && ks[2] == s[2] && ks[3] == s[3] &&
              ks[4] == ks[5] && ks[5] == ks[6] && ks[4] % 2 == 1,
          "ada3d_apply: kernels " + to_string(ks) + " do not match Fb " + to_string(s));
  require(biases.shape() == s,
          "ada3d_apply: biases " + to_string(biases.shape()) + " do not match Fb " + to_string(s));
  const simd::AdaptiveGeometry g{{s[0], s[1], s[2]}, s[3], ks[4]};
  Tensor out(s);
  simd::active_kernels().adaptive_forward(g, fb.value().raw(), kernels.value().raw(),
                                          biases.value().raw(), out.raw());
  return make_op("ada3d_apply", std::move(out), {fb, kernels, biases}, [g](Node& n) {
    const auto& kt = simd::active_kernels();
    Node& fbn = *n.parents[0];
    Node& kn = *n.parents[1];
    Node& dn = *n.parents[2];
    double* dfb = fbn.requires_grad ? fbn.grad_buffer().raw() : nullptr;
    if (kn.requires_grad && !kn.has_grad) {
      kt.adaptive_backward(g, fbn.value.raw(), kn.value.raw(), n.grad.raw(), dfb,
                           kn.grad_buffer().raw());
    } else if (kn.requires_grad) {
      Tensor dk(kn.value.shape());
      kt.adaptive_backward(g, fbn.value.raw(), kn.value.raw(), n.grad.raw(), dfb, dk.raw());
      kn.accumulate(dk);
    } else if (dfb) {
      kt.adaptive_backward(g, fbn.value.raw(), kn.value.raw(), n.grad.raw(), dfb, nullptr);
    }
    if (dn.requires_grad) dn.accumulate(n.grad);
  });
}

Var ada3d_block_forward(const Var& fa, const Var& fb, const Ada3DBlockConfig& cfg,
                        const Ada3DBlockWeights& w) {
  cfg.validate();
  const Var ka = generate_spatial_kernels(fa, cfg, w);
  const Var kb = generate_spectral_kernels(fb, cfg, w);
  Var k = combine_kernels(ka, kb).kernels;
  if (cfg.normalize) k = normalize_kernel_fields(k);
  const AdaptiveBiases d = generate_biases(fa, fb, cfg, w);
  return ada3d_apply(fb, k, d.biases);
}

}  // namespace ada3d
