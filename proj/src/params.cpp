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


#include "ada3d/params.hpp"

#include <cmath>

#include "ada3d/error.hpp"

namespace ada3d {

Tensor kaiming_uniform_init(const Shape& shape, std::size_t fan_in, Rng& rng) {
  if (fan_in == 0) throw ConfigError("kaiming_uniform_init: fan_in must be >= 1");
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  return random_uniform(shape, rng, -bound, bound);
}

Tensor kaiming_uniform_init(const Shape& shape, std::size_t fan_in, std::uint64_t seed) {
  Rng rng(seed);
  return kaiming_uniform_init(shape, fan_in, rng);
}

Var ParameterSet::add(std::string name, Tensor init) {
  for (const auto& [n, v] : entries_) {
    if (n == name) throw ConfigError("duplicate parameter name '" + name + "'");
  }
  Var v(std::move(init), true);
  entries_.emplace_back(std::move(name), v);
  return v;
}

const Var& ParameterSet::at(const std::string& name) const {
  for (const auto& [n, v] : entries_) {
    if (n == name) return v;
  }
  throw ConfigError("unknown parameter '" + name + "'");
}

std::size_t ParameterSet::element_count() const {
  std::size_t total = 0;
  for (const auto& [n, v] : entries_) total += v.value().size();
  return total;
}

void ParameterSet::zero_grad() {
  for (auto& [n, v] : entries_) v.zero_grad();
}

ConvLayer ConvLayer::create(const ConvSpec& spec, ParameterSet& params, const std::string& name,
                            Rng& rng) {
  spec.validate();
  ConvLayer layer;
  layer.spec = spec;
  layer.weight = params.add(name + ".weight",
                            kaiming_uniform_init(spec.weight_shape(), spec.fan_in(), rng));
  if (spec.bias) layer.bias = params.add(name + ".bias", Tensor(spec.bias_shape()));
  return layer;
}

std::vector<Var> ConvLayer::parameters() const {
  std::vector<Var> out{weight};
  if (bias) out.push_back(*bias);
  return out;
}

std::size_t empirical_param_count(const std::vector<Var>& params) {
  std::size_t total = 0;
  for (const Var& v : params) total += v.value().size();
  return total;
}

}  // namespace ada3d
