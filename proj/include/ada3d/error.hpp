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

#include <stdexcept>
#include <string>

namespace ada3d {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor extents or channel counts do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// An axis / mode index outside the tensor order.
class AxisError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or hyper-parameter.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller broke an API precondition (e.g. backward on a non-scalar).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

enum class IoErrorKind {
  kOpen,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kUnknownDtype,
  kBadShape,
  kTrailingBytes,
  kChecksum,
  kMissingEntry,
  kParse,
};

const char* to_string(IoErrorKind kind);

class IoError : public Error {
 public:
  IoError(IoErrorKind kind, const std::string& what)
      : Error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  IoErrorKind kind() const noexcept { return kind_; }

 private:
  IoErrorKind kind_;
};

}  // namespace ada3d
