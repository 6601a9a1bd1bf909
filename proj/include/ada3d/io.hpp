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
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ada3d/network.hpp"
#include "ada3d/tensor.hpp"

namespace ada3d {

// Tensor container layout (all integers little-endian):
//   "ATNS" | u16 version | u32 entry count | u32 CRC-32 of the payload
//   per entry: u16 name length | name bytes | u8 dtype | u8 ndim | u32 dims[ndim] | data
inline constexpr std::uint16_t kContainerVersion = 1;
inline constexpr std::size_t kContainerHeaderSize = 14;

enum class Dtype : std::uint8_t { kF64 = 1, kF32 = 2 };

using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

/// CRC-32 (zlib polynomial) of `bytes`.
std::uint32_t checksum(std::string_view bytes);

std::string encode_container(const NamedTensors& entries, Dtype dtype = Dtype::kF64);
/// Throws IoError with a specific kind on any malformed input.
NamedTensors decode_container(std::string_view bytes);

void write_tensor_file(const std::string& path, const NamedTensors& entries,
                       Dtype dtype = Dtype::kF64);
NamedTensors read_tensor_file(const std::string& path);

/// Looks an entry up by name; IoError(kMissingEntry) if absent.
const Tensor& find_entry(const NamedTensors& entries, std::string_view name);

struct SyntheticDatasetSpec {
  std::size_t n_samples = 16;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t bands = 8;
  double blur_sigma = 1.0;   // Gaussian blur applied before 4x decimation
  double field_sigma = 2.0;   // smoothness of the random abundance fields
  double detail_sigma = 0.7;  // smoothness of the shared fine texture
  std::vector<double> pan_weights;  // empty means uniform 1/L
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<double> resolved_pan_weights() const;
};

/// Same-size Gaussian filter of every band of an H x W or H x W x L tensor,
/// truncated at 3 sigma, replicated borders, weights summing to 1.
Tensor gaussian_blur(const Tensor& x, double sigma);
/// Mean over non-overlapping r x r blocks of every band.
Tensor box_downsample(const Tensor& x, std::size_t r);
/// Weighted band sum of an H x W x L tensor.
Tensor weighted_band_average(const Tensor& x, const std::vector<double>& weights);

/// Degrades a ground truth into (PAN, LR) by blur, 4x decimation and band averaging.
FusionSample degrade(const Tensor& gt, double blur_sigma, const std::vector<double>& pan_weights);

/// Ground truths are linear mixtures of smooth random abundance fields with
/// smooth random spectra, plus a fine texture shared by all bands with a
/// smooth per-band gain and a weak per-band field, clipped to [0, 1].
std::vector<FusionSample> gen_synthetic_dataset(const SyntheticDatasetSpec& spec);

/// Scales PAN, LR and GT by the joint dataset maximum when it exceeds 1.
/// Returns the divisor applied (1 if the data was already in range).
double normalize_dataset(std::vector<FusionSample>& samples);

void save_dataset(const std::string& path, const std::vector<FusionSample>& samples);
std::vector<FusionSample> load_dataset(const std::string& path);

using KeyValues = std::map<std::string, std::string>;

/// "key = value" lines; blank lines and lines starting with '#' are skipped.
KeyValues parse_key_values(std::istream& in);
KeyValues read_key_values(const std::string& path);
void write_key_values(const std::string& path, const KeyValues& kv);

KeyValues network_config_to_key_values(const NetworkConfig& cfg);
NetworkConfig network_config_from_key_values(const KeyValues& kv);
/// Overrides network and training fields present in `kv`; unknown keys and
/// malformed values are ConfigError.
void apply_config(const KeyValues& kv, NetworkConfig& net, TrainConfig& train);

/// Parameters go to `path`, the network configuration to `path + ".manifest"`.
void save_checkpoint(const std::string& path, const FusionNet& net);
FusionNet load_checkpoint(const std::string& path);

/// One machine-readable output line: tab-separated key=value pairs.
class Record {
 public:
  Record& add(std::string_view key, std::string_view value);
  Record& add(std::string_view key, const char* value) { return add(key, std::string_view(value)); }
  Record& add(std::string_view key, double value);
  Record& add(std::string_view key, std::uint64_t value);
  Record& add(std::string_view key, std::int64_t value);
  Record& add(std::string_view key, int value) { return add(key, static_cast<std::int64_t>(value)); }
  const std::string& str() const { return line_; }

 private:
  std::string line_;
};

/// Shortest round-tripping decimal representation of `v`.
std::string format_double(double v);

/// One 8-bit binary PGM per band, values clipped to [0, 1]. Files are named
/// `<prefix>_band<NN>.pgm`; returns the paths written.
std::vector<std::string> write_band_pgms(const Tensor& image, const std::string& prefix);

}  // namespace ada3d
