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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ada3d/autodiff.hpp"
#include "ada3d/conv.hpp"
#include "ada3d/random.hpp"

namespace ada3d {

/// i.i.d. uniform on [-sqrt(6 / fan_in), +sqrt(6 / fan_in)].
Tensor kaiming_uniform_init(const Shape& shape, std::size_t fan_in, std::uint64_t seed);
Tensor kaiming_uniform_init(const Shape& shape, std::size_t fan_in, Rng& rng);

/// Ordered, named collection of learnable leaves. Order is registration
/// order and defines checkpoint layout and optimizer state indexing.
class ParameterSet {
 public:
  Var add(std::string name, Tensor init);

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<std::string, Var>>& entries() const { return entries_; }
  /// Throws ConfigError for unknown names.
  const Var& at(const std::string& name) const;
  /// Total element count across all parameter tensors.
  std::size_t element_count() const;
  void zero_grad();

 private:
  std::vector<std::pair<std::string, Var>> entries_;
};

/// A convolution (or linear) layer bound to its parameters.
struct ConvLayer {
  ConvSpec spec;
  Var weight;
  std::optional<Var> bias;

  /// Weights Kaiming-uniform, bias zero.
  static ConvLayer create(const ConvSpec& spec, ParameterSet& params, const std::string& name,
                          Rng& rng);

  std::vector<Var> parameters() const;
};

/// Element count across parameter handles.
std::size_t empirical_param_count(const std::vector<Var>& params);

}  // namespace ada3d
