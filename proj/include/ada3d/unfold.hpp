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

#include "ada3d/tensor.hpp"

namespace ada3d {

/// Mode-k unfolding with a 1-based mode index. Element (i_1, ..., i_M)
/// lands at row i_k and column j = 1 + sum_{n != k} (i_n - 1) prod_{m < n, m != k} I_m,
/// i.e. the remaining axes are enumerated with the lowest axis fastest.
/// Returns an I_k x (prod_{n != k} I_n) matrix stored row-major.
Tensor mode_k_unfold(const Tensor& t, std::size_t mode);

/// Inverse of mode_k_unfold for the given target shape.
Tensor mode_k_fold(const Tensor& matrix, const Shape& shape, std::size_t mode);

}  // namespace ada3d
