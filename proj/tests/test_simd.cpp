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

#include <cstring>
#include <vector>

#include "ada3d/random.hpp"
#include "ada3d/simd/kernels.hpp"
#include "oracles.hpp"

using namespace ada3d;
using namespace ada3d::simd;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

ConvGeometry random_conv(Rng& rng) {
  ConvGeometry g{};
  for (int d = 0; d < 3; ++d) {
    g.extent[d] = 1 + rng.below(6);
    g.kernel[d] = 1 + 2 * rng.below(2);
  }
  g.groups = 1 + rng.below(3);
  g.in_channels = g.groups * (1 + rng.below(5));
  g.out_channels = g.groups * (1 + rng.below(9));
  return g;
}

std::size_t voxels(const std::size_t* e) { return e[0] * e[1] * e[2]; }

void check_conv_pair(const KernelTable& a, const KernelTable& b, std::uint64_t seed) {
  Rng rng(seed);
  const ConvGeometry g = random_conv(rng);
  const std::size_t taps = g.kernel[0] * g.kernel[1] * g.kernel[2];
  const std::size_t nx = voxels(g.extent) * g.in_channels, ny = voxels(g.extent) * g.out_channels;
  const std::size_t nw = taps * (g.in_channels / g.groups) * g.out_channels;
  const auto x = random_vec(nx, rng), w = random_vec(nw, rng), bias = random_vec(g.out_channels, rng);
  const auto dy = random_vec(ny, rng), wt = random_vec(nw, rng);

  std::vector<double> ya(ny), yb(ny);
  a.conv_forward(g, x.data(), w.data(), bias.data(), ya.data());
  b.conv_forward(g, x.data(), w.data(), bias.data(), yb.data());
  CHECK(same_bits(ya, yb));

  std::vector<double> dxa(nx, 0.5), dxb(nx, 0.5);
  a.conv_backward_input(g, wt.data(), dy.data(), dxa.data());
  b.conv_backward_input(g, wt.data(), dy.data(), dxb.data());
  CHECK(same_bits(dxa, dxb));

  std::vector<double> dwa(nw, 0.25), dwb(nw, 0.25);
  a.conv_backward_weight(g, x.data(), dy.data(), dwa.data());
  b.conv_backward_weight(g, x.data(), dy.data(), dwb.data());
  CHECK(same_bits(dwa, dwb));
}

void check_adaptive_pair(const KernelTable& a, const KernelTable& b, std::uint64_t seed) {
  Rng rng(seed);
  AdaptiveGeometry g{};
  for (int d = 0; d < 3; ++d) g.extent[d] = 1 + rng.below(6);
  g.channels = 1 + rng.below(6);
  g.k = rng.below(2) ? 3 : 1;
  const std::size_t n = voxels(g.extent) * g.channels, nk = n * g.k * g.k * g.k;
  const auto fb = random_vec(n, rng), kern = random_vec(nk, rng), d = random_vec(n, rng);
  const auto dout = random_vec(n, rng);

  std::vector<double> oa(n), ob(n);
  a.adaptive_forward(g, fb.data(), kern.data(), d.data(), oa.data());
  b.adaptive_forward(g, fb.data(), kern.data(), d.data(), ob.data());
  CHECK(same_bits(oa, ob));

  std::vector<double> dfa(n, 0.5), dfb(n, 0.5), dka(nk), dkb(nk);
  a.adaptive_backward(g, fb.data(), kern.data(), dout.data(), dfa.data(), dka.data());
  b.adaptive_backward(g, fb.data(), kern.data(), dout.data(), dfb.data(), dkb.data());
  CHECK(same_bits(dfa, dfb));
  CHECK(same_bits(dka, dkb));
}

}  // namespace

TEST_CASE("scalar conv forward agrees with the naive oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const ConvGeometry g = random_conv(rng);
    const Tensor x = random_uniform(Shape{g.extent[0], g.extent[1], g.extent[2], g.in_channels}, rng);
    const Tensor w = random_uniform(
        Shape{g.kernel[0], g.kernel[1], g.kernel[2], g.in_channels / g.groups, g.out_channels}, rng);
    Tensor y(Shape{g.extent[0], g.extent[1], g.extent[2], g.out_channels});
    scalar_kernels().conv_forward(g, x.raw(), w.raw(), nullptr, y.raw());
    CHECK(max_abs_diff(y, oracle::conv(x, w, {}, g.groups)) < 1e-12);
  }
}

TEST_CASE("scalar adaptive forward agrees with the naive oracle") {
  Rng rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    AdaptiveGeometry g{};
    for (int d = 0; d < 3; ++d) g.extent[d] = 1 + rng.below(5);
    g.channels = 1 + rng.below(4);
    g.k = rng.below(2) ? 3 : 1;
    const Tensor fb = random_uniform(Shape{g.extent[0], g.extent[1], g.extent[2], g.channels}, rng);
    const Tensor k = random_uniform(
        Shape{g.extent[0], g.extent[1], g.extent[2], g.channels, g.k, g.k, g.k}, rng);
    Tensor out(fb.shape());
    scalar_kernels().adaptive_forward(g, fb.raw(), k.raw(), nullptr, out.raw());
    CHECK(max_abs_diff(out, oracle::adaptive_conv(fb, k, nullptr)) < 1e-12);
  }
}

TEST_CASE("vector kernels are bit-identical to the scalar reference") {
  const KernelTable* avx2 = avx2_kernels();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 variant not available on this machine; nothing to compare");
    return;
  }
  CHECK(std::strcmp(avx2->name, scalar_kernels().name) != 0);
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    CAPTURE(seed);
    check_conv_pair(scalar_kernels(), *avx2, seed);
    check_adaptive_pair(scalar_kernels(), *avx2, seed);
  }
}

TEST_CASE("active variant can be overridden") {
  const KernelTable& before = active_kernels();
  set_active_kernels(scalar_kernels());
  CHECK(&active_kernels() == &scalar_kernels());
  set_active_kernels(before);
  CHECK(&active_kernels() == &before);
}
