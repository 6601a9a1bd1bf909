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


#include "ada3d/unfold.hpp"

#include <string>
#include <vector>

#include "ada3d/error.hpp"

namespace ada3d {
namespace {

void check_mode(std::size_t order, std::size_t mode) {
  if (mode < 1 || mode > order) {
    throw AxisError("mode " + std::to_string(mode) + " outside [1, " + std::to_string(order) +
                    "]");
  }
}

// Column stride contributed by each axis; zero for the unfolded axis.
std::vector<std::size_t> column_strides(const Shape& shape, std::size_t axis) {
  std::vector<std::size_t> strides(shape.size(), 0);
  std::size_t s = 1;
  for (std::size_t n = 0; n < shape.size(); ++n) {
    if (n == axis) continue;
    strides[n] = s;
    s *= shape[n];
  }
  return strides;
}

// Visits every element in row-major order, passing (flat offset, row, column).
template <typename Fn>
void for_each_unfolded(const Shape& shape, std::size_t axis, Fn&& fn) {
  const auto strides = column_strides(shape, axis);
  std::vector<std::size_t> index(shape.size(), 0);
  const std::size_t total = numel(shape);
  std::size_t column = 0;
  for (std::size_t flat = 0; flat < total; ++flat) {
    fn(flat, index[axis], column);
    for (std::size_t n = shape.size(); n-- > 0;) {
      if (++index[n] < shape[n]) {
        column += strides[n];
        break;
      }
      column -= strides[n] * (shape[n] - 1);
      index[n] = 0;
    }
  }
}

}  // namespace

Tensor mode_k_unfold(const Tensor& t, std::size_t mode) {
  check_mode(t.order(), mode);
  const std::size_t axis = mode - 1;
  const std::size_t rows = t.shape()[axis];
  const std::size_t cols = t.size() / rows;
  Tensor out(Shape{rows, cols});
  for_each_unfolded(t.shape(), axis, [&](std::size_t flat, std::size_t row, std::size_t col) {
    out[row * cols + col] = t[flat];
  });
  return out;
}

Tensor mode_k_fold(const Tensor& matrix, const Shape& shape, std::size_t mode) {
  check_mode(shape.size(), mode);
  const std::size_t axis = mode - 1;
  const std::size_t rows = shape[axis];
  const std::size_t total = numel(shape);
  if (matrix.order() != 2 || matrix.dim(0) != rows || matrix.dim(1) * rows != total) {
    throw ShapeError("cannot fold " + to_string(matrix.shape()) + " into " + to_string(shape) +
                     " along mode " + std::to_string(mode));
  }
  const std::size_t cols = matrix.dim(1);
  Tensor out(shape);
  for_each_unfolded(shape, axis, [&](std::size_t flat, std::size_t row, std::size_t col) {
    out[flat] = matrix[row * cols + col];
  });
  return out;
}

}  // namespace ada3d
