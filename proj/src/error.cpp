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


#include "ada3d/error.hpp"

namespace ada3d {

const char* to_string(IoErrorKind kind) {
  switch (kind) {
    case IoErrorKind::kOpen: return "open";
    case IoErrorKind::kBadMagic: return "bad-magic";
    case IoErrorKind::kBadVersion: return "bad-version";
    case IoErrorKind::kTruncated: return "truncated";
    case IoErrorKind::kUnknownDtype: return "unknown-dtype";
    case IoErrorKind::kBadShape: return "bad-shape";
    case IoErrorKind::kTrailingBytes: return "trailing-bytes";
    case IoErrorKind::kChecksum: return "checksum";
    case IoErrorKind::kMissingEntry: return "missing-entry";
    case IoErrorKind::kParse: return "parse";
  }
  return "unknown";
}

}  // namespace ada3d
