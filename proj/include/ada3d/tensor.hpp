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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ada3d {

using Shape = std::vector<std::size_t>;

/// Number of elements described by `shape` (1 for the empty shape).
std::size_t numel(const Shape& shape);

std::string to_string(const Shape& shape);

/// Dense row-major tensor of doubles. Axis order follows the domain
/// convention (height, width, band, channel, ...), last axis fastest.
class Tensor {
 public:
  /// A one-element tensor of shape {1} holding 0.
  Tensor();
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor scalar(double value) { return Tensor(Shape{1}, value); }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t order() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }
  const double* raw() const noexcept { return data_.data(); }
  double* raw() noexcept { return data_.data(); }

  double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }

  /// Row-major offset of a multi-index; throws AxisError/ShapeError on misuse.
  std::size_t offset(std::initializer_list<std::size_t> index) const;
  double at(std::initializer_list<std::size_t> index) const { return data_[offset(index)]; }
  double& at(std::initializer_list<std::size_t> index) { return data_[offset(index)]; }

  /// Same data under a new shape with equal element count.
  Tensor reshaped(Shape shape) const;

  /// Only meaningful for one-element tensors.
  double item() const;

  void fill(double value);

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Largest absolute elementwise difference; shapes must match.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace ada3d
