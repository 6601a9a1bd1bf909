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


#include "ada3d/conv.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "ada3d/error.hpp"
#include "ada3d/simd/kernels.hpp"

namespace ada3d {
namespace {

using Extent3 = std::array<std::size_t, 3>;

ConvSpec make_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t dims,
                   std::size_t groups, bool bias) {
  ConvSpec s;
  s.in_channels = in;
  s.out_channels = out;
  s.kernel.assign(dims, k);
  s.groups = groups;
  s.bias = bias;
  s.validate();
  return s;
}

// Shared body of conv1d/2d/3d and linear: the data is viewed as an
// extent[0] x extent[1] x extent[2] grid with channels last.
Var conv_grid(const char* op, const Var& x, const Extent3& extent, const Extent3& kernel,
              const ConvSpec& spec, const Var& weights, const std::optional<Var>& bias,
              Shape out_shape) {
  spec.validate();
  if (x.shape().back() != spec.in_channels) {
    throw ShapeError(std::string(op) + ": input " + to_string(x.shape()) + " has " +
                     std::to_string(x.shape().back()) + " channels, spec expects " +
                     std::to_string(spec.in_channels));
  }
  if (weights.shape() != spec.weight_shape()) {
    throw ShapeError(std::string(op) + ": weights " + to_string(weights.shape()) +
                     ", expected " + to_string(spec.weight_shape()));
  }
  if (bias && bias->shape() != spec.bias_shape()) {
    throw ShapeError(std::string(op) + ": bias " + to_string(bias->shape()) + ", expected " +
                     to_string(spec.bias_shape()));
  }
  const simd::ConvGeometry g{{extent[0], extent[1], extent[2]},
                             {kernel[0], kernel[1], kernel[2]},
                             spec.in_channels,
                             spec.out_channels,
                             spec.groups};
  Tensor y(std::move(out_shape));
  simd::active_kernels().conv_forward(g, x.value().raw(), weights.value().raw(),
                                      bias ? bias->value().raw() : nullptr, y.raw());
  std::vector<Var> parents{x, weights};
  if (bias) parents.push_back(*bias);
  return make_op(op, std::move(y), std::move(parents), [g](Node& n) {
    const auto& kt = simd::active_kernels();
    const Node& xn = *n.parents[0];
    const Node& wn = *n.parents[1];
    const double* dy = n.grad.raw();
    if (n.parents[0]->requires_grad) {
      // (taps, cin_g, cout) -> (taps, cout, cin_g)
      const std::size_t cin_g = g.in_channels / g.groups;
      const std::size_t cout = g.out_channels;
      const std::size_t taps = g.kernel[0] * g.kernel[1] * g.kernel[2];
      std::vector<double> wt(wn.value.size());
      const double* w = wn.value.raw();
      for (std::size_t t = 0; t < taps; ++t) {
        for (std::size_t ci = 0; ci < cin_g; ++ci) {
          for (std::size_t co = 0; co < cout; ++co) {
            wt[(t * cout + co) * cin_g + ci] = w[(t * cin_g + ci) * cout + co];
          }
        }
      }
      kt.conv_backward_input(g, wt.data(), dy, n.parents[0]->grad_buffer().raw());
    }
    if (n.parents[1]->requires_grad) {
      kt.conv_backward_weight(g, xn.value.raw(), dy, n.parents[1]->grad_buffer().raw());
    }
    if (n.parents.size() > 2 && n.parents[2]->requires_grad) {
      Tensor& gb = n.parents[2]->grad_buffer();
      const std::size_t cout = g.out_channels;
      const std::size_t positions = n.grad.size() / cout;
      for (std::size_t p = 0; p < positions; ++p) {
        for (std::size_t co = 0; co < cout; ++co) gb[co] += dy[p * cout + co];
      }
    }
  });
}

void require_order(const char* op, const Var& x, std::size_t order) {
  if (x.value().order() != order) {
    throw ShapeError(std::string(op) + ": expected order-" + std::to_string(order) +
                     " input, got " + to_string(x.shape()));
  }
}

void require_kernel_dims(const char* op, const ConvSpec& spec, std::size_t dims) {
  if (spec.kernel.size() != dims) {
    throw ConfigError(std::string(op) + ": spec has " + std::to_string(spec.kernel.size()) +
                      " kernel extents, expected " + std::to_string(dims));
  }
}

// Per-output-index taps of a 1D resampling along one axis.
struct Resample1d {
  std::size_t n_in = 0;
  std::size_t n_out = 0;
  std::vector<std::array<std::size_t, 4>> index;
  std::vector<std::array<double, 4>> weight;
};

Resample1d bicubic_taps(std::size_t n_in, std::size_t r) {
  Resample1d t;
  t.n_in = n_in;
  t.n_out = n_in * r;
  t.index.resize(t.n_out);
  t.weight.resize(t.n_out);
  const double last = static_cast<double>(n_in - 1);
  for (std::size_t o = 0; o < t.n_out; ++o) {
    double s = (static_cast<double>(o) + 0.5) / static_cast<double>(r) - 0.5;
    s = std::fmin(std::fmax(s, 0.0), last);
    const double base = std::floor(s);
    const double f = s - base;
    const auto i0 = static_cast<long long>(base);
    for (int a = 0; a < 4; ++a) {
      long long idx = i0 - 1 + a;
      if (idx < 0) idx = 0;
      if (idx > static_cast<long long>(n_in - 1)) idx = static_cast<long long>(n_in - 1);
      t.index[o][a] = static_cast<std::size_t>(idx);
      t.weight[o][a] = keys_cubic(f - static_cast<double>(a - 1));
    }
  }
  return t;
}

// src viewed as (outer, n_in, inner) -> dst (outer, n_out, inner).
void resample_forward(const Resample1d& t, std::size_t outer, std::size_t inner,
                      const double* src, double* dst) {
  for (std::size_t a = 0; a < outer; ++a) {
    for (std::size_t o = 0; o < t.n_out; ++o) {
      double* d = dst + (a * t.n_out + o) * inner;
      for (std::size_t c = 0; c < inner; ++c) d[c] = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double w = t.weight[o][k];
        const double* s = src + (a * t.n_in + t.index[o][k]) * inner;
        for (std::size_t c = 0; c < inner; ++c) d[c] += w * s[c];
      }
    }
  }
}

// Adjoint of resample_forward, accumulating into dsrc.
void resample_adjoint(const Resample1d& t, std::size_t outer, std::size_t inner,
                      const double* ddst, double* dsrc) {
  for (std::size_t a = 0; a < outer; ++a) {
    for (std::size_t o = 0; o < t.n_out; ++o) {
      const double* d = ddst + (a * t.n_out + o) * inner;
      for (int k = 0; k < 4; ++k) {
        const double w = t.weight[o][k];
        double* s = dsrc + (a * t.n_in + t.index[o][k]) * inner;
        for (std::size_t c = 0; c < inner; ++c) s[c] += w * d[c];
      }
    }
  }
}

}  // namespace

Shape ConvSpec::weight_shape() const {
  Shape s(kernel.begin(), kernel.end());
  s.push_back(groups == 0 ? 0 : in_channels / groups);
  s.push_back(out_channels);
  return s;
}

std::size_t ConvSpec::fan_in() const {
  std::size_t f = groups == 0 ? 0 : in_channels / groups;
  for (std::size_t k : kernel) f *= k;
  return f;
}

std::size_t ConvSpec::param_count() const {
  return numel(weight_shape()) + (bias ? out_channels : 0);
}

void ConvSpec::validate() const {
  if (in_channels == 0 || out_channels == 0) throw ConfigError("conv channels must be >= 1");
  if (groups == 0 || in_channels % groups != 0 || out_channels % groups != 0) {
    throw ConfigError("groups " + std::to_string(groups) + " must divide in " +
                      std::to_string(in_channels) + " and out " + std::to_string(out_channels));
  }
  if (kernel.empty() || kernel.size() > 3) throw ConfigError("conv needs 1 to 3 kernel extents");
  for (std::size_t k : kernel) {
    if (k % 2 == 0) throw ConfigError("kernel extents must be odd, got " + std::to_string(k));
  }
}

ConvSpec conv1d_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t groups,
                     bool bias) {
  return make_spec(in, out, k, 1, groups, bias);
}
ConvSpec conv2d_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t groups,
                     bool bias) {
  return make_spec(in, out, k, 2, groups, bias);
}
ConvSpec conv3d_spec(std::size_t in, std::size_t out, std::size_t k, std::size_t groups,
                     bool bias) {
  return make_spec(in, out, k, 3, groups, bias);
}

Var conv1d(const Var& x, const ConvSpec& spec, const Var& weights, const std::optional<Var>& bias) {
  require_order("conv1d", x, 2);
  require_kernel_dims("conv1d", spec, 1);
  const std::size_t l = x.shape()[0];
  return conv_grid("conv1d", x, {1, 1, l}, {1, 1, spec.kernel[0]}, spec, weights, bias,
                   Shape{l, spec.out_channels});
}

Var conv2d(const Var& x, const ConvSpec& spec, const Var& weights, const std::optional<Var>& bias) {
  require_order("conv2d", x, 3);
  require_kernel_dims("conv2d", spec, 2);
  const std::size_t h = x.shape()[0], w = x.shape()[1];
  return conv_grid("conv2d", x, {h, w, 1}, {spec.kernel[0], spec.kernel[1], 1}, spec, weights,
                   bias, Shape{h, w, spec.out_channels});
}

Var conv3d(const Var& x, const ConvSpec& spec, const Var& weights, const std::optional<Var>& bias) {
  require_order("conv3d", x, 4);
  require_kernel_dims("conv3d", spec, 3);
  const std::size_t h = x.shape()[0], w = x.shape()[1], l = x.shape()[2];
  return conv_grid("conv3d", x, {h, w, l}, {spec.kernel[0], spec.kernel[1], spec.kernel[2]}, spec,
                   weights, bias, Shape{h, w, l, spec.out_channels});
}

Var linear(const Var& x, const Var& weights, const std::optional<Var>& bias) {
  require_order("linear", x, 1);
  if (weights.value().order() != 2) throw ShapeError("linear: weights must be a matrix");
  const ConvSpec spec = conv1d_spec(weights.shape()[0], weights.shape()[1], 1, 1, bias.has_value());
  const Var w3 = reshape(weights, spec.weight_shape());
  return conv_grid("linear", x, {1, 1, 1}, {1, 1, 1}, spec, w3, bias, Shape{spec.out_channels});
}

double keys_cubic(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return a * (((t - 5.0) * t + 8.0) * t - 4.0);
  return 0.0;
}

Var bicubic_upsample(const Var& x, std::size_t r) {
  if (r < 1) throw ConfigError("bicubic_upsample: scale must be >= 1");
  require_order("bicubic_upsample", x, 3);
  const std::size_t h = x.shape()[0], w = x.shape()[1], l = x.shape()[2];
  if (h < 2 || w < 2) throw ShapeError("bicubic_upsample: needs h, w >= 2");
  if (r == 1) return reshape(x, x.shape());
  auto rows = std::make_shared<Resample1d>(bicubic_taps(h, r));
  auto cols = std::make_shared<Resample1d>(bicubic_taps(w, r));
  std::vector<double> tmp(h * w * r * l);
  resample_forward(*cols, h, l, x.value().raw(), tmp.data());
  Tensor out(Shape{h * r, w * r, l});
  resample_forward(*rows, 1, w * r * l, tmp.data(), out.raw());
  return make_op("bicubic_upsample", std::move(out), {x}, [rows, cols, h, w, r, l](Node& n) {
    std::vector<double> dtmp(h * w * r * l, 0.0);
    resample_adjoint(*rows, 1, w * r * l, n.grad.raw(), dtmp.data());
    resample_adjoint(*cols, h, l, dtmp.data(), n.parents[0]->grad_buffer().raw());
  });
}

Var pixel_shuffle(const Var& x, std::size_t r) {
  require_order("pixel_shuffle", x, 3);
  if (r < 1) throw ConfigError("pixel_shuffle: scale must be >= 1");
  const std::size_t h = x.shape()[0], w = x.shape()[1], c = x.shape()[2];
  if (c % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: " + std::to_string(c) + " channels not divisible by r^2 = " +
                     std::to_string(r * r));
  }
  const std::size_t l = c / (r * r);
  const std::size_t ow = w * r;
  // src index for each destination element
  auto perm = std::make_shared<std::vector<std::size_t>>(x.value().size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t xx = 0; xx < w; ++xx) {
      for (std::size_t b = 0; b < l; ++b) {
        for (std::size_t dy = 0; dy < r; ++dy) {
          for (std::size_t dx = 0; dx < r; ++dx) {
            const std::size_t dst = ((y * r + dy) * ow + xx * r + dx) * l + b;
            (*perm)[dst] = (y * w + xx) * c + b * r * r + dy * r + dx;
          }
        }
      }
    }
  }
  Tensor out(Shape{h * r, ow, l});
  const Tensor& v = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[(*perm)[i]];
  return make_op("pixel_shuffle", std::move(out), {x}, [perm](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t i = 0; i < n.grad.size(); ++i) g[(*perm)[i]] += n.grad[i];
  });
}

Var pixel_shuffle_upsample(const Var& x, std::size_t r, const Var& weights,
                           const std::optional<Var>& bias) {
  require_order("pixel_shuffle_upsample", x, 3);
  const std::size_t l = x.shape()[2];
  const ConvSpec spec = conv2d_spec(l, r * r * l, 3, 1, bias.has_value());
  return pixel_shuffle(conv2d(x, spec, weights, bias), r);
}

Var global_avg_pool_spatial(const Var& x) {
  if (x.value().order() < 3) {
    throw ShapeError("global_avg_pool_spatial: need H x W x ..., got " + to_string(x.shape()));
  }
  const std::size_t hw = x.shape()[0] * x.shape()[1];
  Shape rest(x.shape().begin() + 2, x.shape().end());
  const std::size_t inner = numel(rest);
  Tensor out(rest);
  const Tensor& v = x.value();
  for (std::size_t p = 0; p < hw; ++p) {
    for (std::size_t i = 0; i < inner; ++i) out[i] += v[p * inner + i];
  }
  const double inv = 1.0 / static_cast<double>(hw);
  for (double& o : out.data()) o *= inv;
  return make_op("global_avg_pool_spatial", std::move(out), {x}, [hw, inner, inv](Node& n) {
    Tensor& g = n.parents[0]->grad_buffer();
    for (std::size_t p = 0; p < hw; ++p) {
      for (std::size_t i = 0; i < inner; ++i) g[p * inner + i] += n.grad[i] * inv;
    }
  });
}

}  // namespace ada3d
