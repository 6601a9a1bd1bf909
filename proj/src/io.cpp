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


#include "ada3d/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

#include "ada3d/error.hpp"
#include "ada3d/random.hpp"

namespace ada3d {
namespace {

constexpr char kMagic[4] = {'A', 'T', 'N', 'S'};

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t crc_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + off), static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint64_t uint(std::size_t width, const char* what) {
    need(width, what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    const std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw IoError(IoErrorKind::kTruncated, std::string("container ends inside ") + what);
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(IoErrorKind::kOpen, "cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(IoErrorKind::kOpen, "cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(IoErrorKind::kOpen, "short write to '" + path + "'");
}

std::string entry_name(std::string_view kind, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", i);
  return std::string(kind) + "/" + buf;
}

double min_max_normalized(Tensor& t) {
  const auto [lo, hi] = std::minmax_element(t.data().begin(), t.data().end());
  const double a = *lo, range = *hi - *lo;
  for (double& v : t.data()) v = range > 0.0 ? (v - a) / range : 0.5;
  return range;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = first + value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("bad value '" + value + "' for key '" + key + "'");
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(parse_number<std::size_t>(key, t));
  }
  return out;
}

bool apply_network_key(const std::string& key, const std::string& v, NetworkConfig& c) {
  if (key == "bands") c.bands = parse_number<std::size_t>(key, v);
  else if (key == "spatial_channels") c.spatial_channels = parse_number<std::size_t>(key, v);
  else if (key == "spectral_channels") c.spectral_channels = parse_number<std::size_t>(key, v);
  else if (key == "k") c.k = parse_number<std::size_t>(key, v);
  else if (key == "alpha") c.alpha = parse_number<double>(key, v);
  else if (key == "beta") c.beta = parse_number<double>(key, v);
  else if (key == "resblocks") c.resblocks = parse_number<std::size_t>(key, v);
  else if (key == "ada3d_blocks") c.ada3d_blocks = parse_number<std::size_t>(key, v);
  else if (key == "upsampler") c.upsampler = parse_upsampler(v);
  else if (key == "scale") c.scale = parse_number<std::size_t>(key, v);
  else return false;
  return true;
}

bool apply_train_key(const std::string& key, const std::string& v, TrainConfig& c) {
  if (key == "epochs") c.epochs = parse_number<std::size_t>(key, v);
  else if (key == "batch_size") c.batch_size = parse_number<std::size_t>(key, v);
  else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, v);
  else if (key == "halve_at") c.halve_at = parse_size_list(key, v);
  else if (key == "halve_every") c.halve_at = halving_every(parse_number<std::size_t>(key, v), c.epochs);
  else if (key == "lambda_ergas") c.lambda_ergas = parse_number<double>(key, v);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "beta1") c.beta1 = parse_number<double>(key, v);
  else if (key == "beta2") c.beta2 = parse_number<double>(key, v);
  else if (key == "epsilon") c.epsilon = parse_number<double>(key, v);
  else if (key == "ergas_mean") {
    if (v == "squared-mean") c.ergas_mean = ErgasMean::kSquaredMean;
    else if (v == "mean-square") c.ergas_mean = ErgasMean::kMeanSquare;
    else throw ConfigError("ergas_mean must be squared-mean or mean-square, got '" + v + "'");
  } else {
    return false;
  }
  return true;
}

}  // namespace

std::uint32_t checksum(std::string_view bytes) { return crc_of(bytes); }

std::string encode_container(const NamedTensors& entries, Dtype dtype) {
  if (dtype != Dtype::kF64 && dtype != Dtype::kF32) {
    throw IoError(IoErrorKind::kUnknownDtype, "cannot encode dtype " +
                                                  std::to_string(static_cast<int>(dtype)));
  }
  if (entries.size() > 0xffffffffu) throw IoError(IoErrorKind::kBadShape, "too many entries");
  std::string payload;
  for (const auto& [name, t] : entries) {
    if (name.size() > 0xffff) throw IoError(IoErrorKind::kBadShape, "entry name too long");
    if (t.order() > 0xff) throw IoError(IoErrorKind::kBadShape, "tensor order too large");
    put_u16(payload, static_cast<std::uint16_t>(name.size()));
    payload.append(name);
    put_u8(payload, static_cast<std::uint8_t>(dtype));
    put_u8(payload, static_cast<std::uint8_t>(t.order()));
    for (std::size_t d : t.shape()) {
      if (d > 0xffffffffu) throw IoError(IoErrorKind::kBadShape, "extent exceeds u32");
      put_u32(payload, static_cast<std::uint32_t>(d));
    }
    for (double v : t.data()) {
      if (dtype == Dtype::kF64) {
        put_u64(payload, std::bit_cast<std::uint64_t>(v));
      } else {
        put_u32(payload, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      }
    }
  }
  std::string out(kMagic, sizeof kMagic);
  put_u16(out, kContainerVersion);
  put_u32(out, static_cast<std::uint32_t>(entries.size()));
  put_u32(out, crc_of(payload));
  out.append(payload);
  return out;
}

NamedTensors decode_container(std::string_view bytes) {
  Reader rd(bytes);
  if (bytes.size() < sizeof kMagic) throw IoError(IoErrorKind::kTruncated, "missing magic");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw IoError(IoErrorKind::kBadMagic, "not an ATNS container");
  }
  rd.take(sizeof kMagic, "magic");
  const auto version = rd.uint(2, "version");
  if (version != kContainerVersion) {
    throw IoError(IoErrorKind::kBadVersion, "unsupported version " + std::to_string(version));
  }
  const auto count = rd.uint(4, "entry count");
  const auto crc = static_cast<std::uint32_t>(rd.uint(4, "checksum"));
  const std::string_view payload = bytes.substr(kContainerHeaderSize);

  NamedTensors out;
  std::set<std::string, std::less<>> seen;
  for (std::uint64_t e = 0; e < count; ++e) {
    const auto name_len = rd.uint(2, "entry name length");
    std::string name(rd.take(name_len, "entry name"));
    if (!seen.insert(name).second) {
      throw IoError(IoErrorKind::kParse, "duplicate entry '" + name + "'");
    }
    const auto dtype = rd.uint(1, "dtype");
    if (dtype != static_cast<std::uint8_t>(Dtype::kF64) &&
        dtype != static_cast<std::uint8_t>(Dtype::kF32)) {
      throw IoError(IoErrorKind::kUnknownDtype, "entry '" + name + "' has dtype " +
                                                    std::to_string(dtype));
    }
    const std::size_t width = dtype == static_cast<std::uint8_t>(Dtype::kF64) ? 8 : 4;
    const auto ndim = rd.uint(1, "ndim");
    Shape shape;
    std::size_t n = 1;
    for (std::uint64_t d = 0; d < ndim; ++d) {
      const auto ext = static_cast<std::size_t>(rd.uint(4, "dims"));
      if (ext == 0) throw IoError(IoErrorKind::kBadShape, "entry '" + name + "' has a zero extent");
      if (n > rd.remaining() / width / ext) {
        throw IoError(IoErrorKind::kTruncated, "entry '" + name + "' data exceeds the file");
      }
      n *= ext;
      shape.push_back(ext);
    }
    const std::string_view raw = rd.take(n * width, "tensor data");
    std::vector<double> data(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t bitsv = 0;
      for (std::size_t b = 0; b < width; ++b) {
        bitsv |= static_cast<std::uint64_t>(static_cast<unsigned char>(raw[i * width + b]))
                 << (8 * b);
      }
      data[i] = width == 8 ? std::bit_cast<double>(bitsv)
                           : static_cast<double>(
                                 std::bit_cast<float>(static_cast<std::uint32_t>(bitsv)));
    }
    out.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  if (rd.remaining() != 0) {
    throw IoError(IoErrorKind::kTrailingBytes,
                  std::to_string(rd.remaining()) + " bytes after the last entry");
  }
  if (crc_of(payload) != crc) throw IoError(IoErrorKind::kChecksum, "payload CRC-32 mismatch");
  return out;
}

void write_tensor_file(const std::string& path, const NamedTensors& entries, Dtype dtype) {
  write_file(path, encode_container(entries, dtype));
}

NamedTensors read_tensor_file(const std::string& path) { return decode_container(read_file(path)); }

const Tensor& find_entry(const NamedTensors& entries, std::string_view name) {
  for (const auto& [n, t] : entries) {
    if (n == name) return t;
  }
  throw IoError(IoErrorKind::kMissingEntry, "no entry named '" + std::string(name) + "'");
}

void SyntheticDatasetSpec::validate() const {
  if (n_samples == 0 || bands == 0) throw ConfigError("dataset needs samples and bands >= 1");
  if (height == 0 || width == 0 || height % 4 || width % 4) {
    throw ConfigError("dataset height and width must be positive multiples of 4");
  }
  if (blur_sigma < 0.0 || field_sigma < 0.0 || detail_sigma < 0.0) throw ConfigError("sigmas must be non-negative");
  if (!pan_weights.empty()) {
    if (pan_weights.size() != bands) throw ConfigError("need one PAN weight per band");
    double s = 0.0;
    for (double w : pan_weights) {
      if (w < 0.0) throw ConfigError("PAN weights must be non-negative");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("PAN weights must sum to 1");
  }
}

std::vector<double> SyntheticDatasetSpec::resolved_pan_weights() const {
  if (!pan_weights.empty()) return pan_weights;
  return std::vector<double>(bands, 1.0 / static_cast<double>(bands));
}

Tensor gaussian_blur(const Tensor& x, double sigma) {
  if (x.order() != 2 && x.order() != 3) {
    throw ShapeError("blur expects H x W or H x W x L, got " + to_string(x.shape()));
  }
  if (sigma < 0.0) throw ConfigError("blur sigma must be non-negative");
  if (sigma == 0.0) return x;
  const std::size_t h = x.dim(0), w = x.dim(1), l = x.order() == 3 ? x.dim(2) : 1;
  const long radius = static_cast<long>(std::ceil(3.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double s = 0.0;
  for (long i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    s += taps[i + radius];
  }
  for (double& t : taps) t /= s;

  auto clampi = [](long v, std::size_t n) {
    return static_cast<std::size_t>(std::clamp<long>(v, 0, static_cast<long>(n) - 1));
  };
  Tensor tmp(x.shape()), out(x.shape());
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t b = 0; b < l; ++b) {
        double acc = 0.0;
        for (long t = -radius; t <= radius; ++t) {
          acc += taps[t + radius] * x[(i * w + clampi(static_cast<long>(j) + t, w)) * l + b];
        }
        tmp[(i * w + j) * l + b] = acc;
      }
    }
  }
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      for (std::size_t b = 0; b < l; ++b) {
        double acc = 0.0;
        for (long t = -radius; t <= radius; ++t) {
          acc += taps[t + radius] * tmp[(clampi(static_cast<long>(i) + t, h) * w + j) * l + b];
        }
        out[(i * w + j) * l + b] = acc;
      }
    }
  }
  return out;
}

Tensor box_downsample(const Tensor& x, std::size_t r) {
  if (x.order() != 2 && x.order() != 3) {
    throw ShapeError("downsample expects H x W or H x W x L, got " + to_string(x.shape()));
  }
  if (r == 0 || x.dim(0) % r || x.dim(1) % r) {
    throw ShapeError("extent " + to_string(x.shape()) + " not divisible by " + std::to_string(r));
  }
  const std::size_t w = x.dim(1), l = x.order() == 3 ? x.dim(2) : 1;
  const std::size_t oh = x.dim(0) / r, ow = w / r;
  Shape shape{oh, ow};
  if (x.order() == 3) shape.push_back(l);
  Tensor out(shape);
  const double inv = 1.0 / static_cast<double>(r * r);
  for (std::size_t i = 0; i < oh; ++i) {
    for (std::size_t j = 0; j < ow; ++j) {
      for (std::size_t b = 0; b < l; ++b) {
        double acc = 0.0;
        for (std::size_t di = 0; di < r; ++di) {
          for (std::size_t dj = 0; dj < r; ++dj) acc += x[((i * r + di) * w + j * r + dj) * l + b];
        }
        out[(i * ow + j) * l + b] = acc * inv;
      }
    }
  }
  return out;
}

Tensor weighted_band_average(const Tensor& x, const std::vector<double>& weights) {
  if (x.order() != 3 || weights.size() != x.dim(2)) {
    throw ShapeError("band average of " + to_string(x.shape()) + " with " +
                     std::to_string(weights.size()) + " weights");
  }
  const std::size_t l = x.dim(2), pixels = x.dim(0) * x.dim(1);
  Tensor out(Shape{x.dim(0), x.dim(1)});
  for (std::size_t p = 0; p < pixels; ++p) {
    double acc = 0.0;
    for (std::size_t b = 0; b < l; ++b) acc += weights[b] * x[p * l + b];
    out[p] = acc;
  }
  return out;
}

FusionSample degrade(const Tensor& gt, double blur_sigma, const std::vector<double>& pan_weights) {
  FusionSample s;
  s.pan = weighted_band_average(gt, pan_weights);
  s.lr = box_downsample(gaussian_blur(gt, blur_sigma), 4);
  s.gt = gt;
  return s;
}

std::vector<FusionSample> gen_synthetic_dataset(const SyntheticDatasetSpec& spec) {
  spec.validate();
  constexpr std::size_t kMaterials = 4;
  constexpr double kBandFieldWeight = 0.05;
  const std::size_t h = spec.height, w = spec.width, l = spec.bands;
  const std::vector<double> pan_w = spec.resolved_pan_weights();
  Rng rng(spec.seed);

  auto smooth_curve = [&](double centre, double amplitude) {
    const double freq = rng.uniform(0.3, 1.5);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> c(l);
    for (std::size_t b = 0; b < l; ++b) {
      const double t = l > 1 ? static_cast<double>(b) / static_cast<double>(l - 1) : 0.0;
      c[b] = centre + amplitude * std::sin(2.0 * std::numbers::pi * freq * t + phase);
    }
    return c;
  };
  std::vector<std::vector<double>> spectra;
  for (std::size_t j = 0; j < kMaterials; ++j) spectra.push_back(smooth_curve(0.5, 0.35));
  const std::vector<double> detail_gain = smooth_curve(0.15, 0.1);

  std::vector<FusionSample> out;
  out.reserve(spec.n_samples);
  for (std::size_t n = 0; n < spec.n_samples; ++n) {
    std::vector<Tensor> abundance;
    Tensor total(Shape{h, w});
    for (std::size_t j = 0; j < kMaterials; ++j) {
      Tensor f = gaussian_blur(random_uniform(Shape{h, w}, rng, 0.0, 1.0), spec.field_sigma);
      min_max_normalized(f);
      for (std::size_t p = 0; p < f.size(); ++p) {
        f[p] += 0.05;
        total[p] += f[p];
      }
      abundance.push_back(std::move(f));
    }
    Tensor detail = gaussian_blur(random_uniform(Shape{h, w}, rng, 0.0, 1.0), spec.detail_sigma);
    min_max_normalized(detail);
    Tensor band_field =
        gaussian_blur(random_uniform(Shape{h, w, l}, rng, 0.0, 1.0), spec.field_sigma);
    min_max_normalized(band_field);

    Tensor gt(Shape{h, w, l});
    for (std::size_t p = 0; p < h * w; ++p) {
      for (std::size_t b = 0; b < l; ++b) {
        double v = 0.0;
        for (std::size_t j = 0; j < kMaterials; ++j) v += abundance[j][p] * spectra[j][b];
        v = v / total[p] + detail_gain[b] * (detail[p] - 0.5) +
            kBandFieldWeight * (band_field[p * l + b] - 0.5);
        gt[p * l + b] = std::clamp(v, 0.0, 1.0);
      }
    }
    out.push_back(degrade(gt, spec.blur_sigma, pan_w));
  }
  return out;
}

double normalize_dataset(std::vector<FusionSample>& samples) {
  double peak = 0.0;
  auto scan = [&peak](const Tensor& t) {
    for (double v : t.data()) {
      if (v < 0.0 || !std::isfinite(v)) throw ShapeError("sample values must be finite and >= 0");
      peak = std::max(peak, v);
    }
  };
  for (const FusionSample& s : samples) {
    scan(s.pan);
    scan(s.lr);
    if (s.gt) scan(*s.gt);
  }
  if (peak <= 1.0) return 1.0;
  auto rescale = [peak](Tensor& t) {
    for (double& v : t.data()) v /= peak;
  };
  for (FusionSample& s : samples) {
    rescale(s.pan);
    rescale(s.lr);
    if (s.gt) rescale(*s.gt);
  }
  return peak;
}

void save_dataset(const std::string& path, const std::vector<FusionSample>& samples) {
  NamedTensors entries;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].validate();
    entries.emplace_back(entry_name("pan", i), samples[i].pan);
    entries.emplace_back(entry_name("lr", i), samples[i].lr);
    if (samples[i].gt) entries.emplace_back(entry_name("gt", i), *samples[i].gt);
  }
  write_tensor_file(path, entries);
}

std::vector<FusionSample> load_dataset(const std::string& path) {
  const NamedTensors entries = read_tensor_file(path);
  std::map<std::string, const Tensor*, std::less<>> by_name;
  for (const auto& [n, t] : entries) by_name[n] = &t;
  std::vector<FusionSample> out;
  for (std::size_t i = 0;; ++i) {
    const auto pan = by_name.find(entry_name("pan", i));
    if (pan == by_name.end()) break;
    const auto lr = by_name.find(entry_name("lr", i));
    if (lr == by_name.end()) {
      throw IoError(IoErrorKind::kMissingEntry, "sample " + std::to_string(i) + " has no LR");
    }
    FusionSample s{*pan->second, *lr->second, std::nullopt};
    if (const auto gt = by_name.find(entry_name("gt", i)); gt != by_name.end()) s.gt = *gt->second;
    try {
      s.validate();
    } catch (const ShapeError& e) {
      throw IoError(IoErrorKind::kBadShape, "sample " + std::to_string(i) + ": " + e.what());
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw IoError(IoErrorKind::kMissingEntry, "'" + path + "' holds no samples");
  return out;
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw IoError(IoErrorKind::kParse, "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) throw IoError(IoErrorKind::kParse, "line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoErrorKind::kOpen, "cannot open '" + path + "' for reading");
  return parse_key_values(in);
}

void write_key_values(const std::string& path, const KeyValues& kv) {
  std::string text;
  for (const auto& [k, v] : kv) text += k + " = " + v + "\n";
  write_file(path, text);
}

KeyValues network_config_to_key_values(const NetworkConfig& c) {
  return {
      {"bands", std::to_string(c.bands)},
      {"spatial_channels", std::to_string(c.spatial_channels)},
      {"spectral_channels", std::to_string(c.spectral_channels)},
      {"k", std::to_string(c.k)},
      {"alpha", format_double(c.alpha)},
      {"beta", format_double(c.beta)},
      {"resblocks", std::to_string(c.resblocks)},
      {"ada3d_blocks", std::to_string(c.ada3d_blocks)},
      {"upsampler", std::string(to_string(c.upsampler))},
      {"scale", std::to_string(c.scale)},
  };
}

NetworkConfig network_config_from_key_values(const KeyValues& kv) {
  NetworkConfig c;
  for (const char* key : {"bands", "spatial_channels", "spectral_channels", "k", "alpha", "beta",
                          "resblocks", "ada3d_blocks", "upsampler", "scale"}) {
    if (!kv.count(key)) throw IoError(IoErrorKind::kMissingEntry, std::string("manifest lacks ") + key);
  }
  for (const auto& [k, v] : kv) {
    if (!apply_network_key(k, v, c)) throw ConfigError("unknown manifest key '" + k + "'");
  }
  c.validate();
  return c;
}

void apply_config(const KeyValues& kv, NetworkConfig& net, TrainConfig& train) {
  // halve_every depends on epochs, so it is applied last.
  for (const auto& [k, v] : kv) {
    if (k == "halve_every") continue;
    if (!apply_network_key(k, v, net) && !apply_train_key(k, v, train)) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  if (const auto it = kv.find("halve_every"); it != kv.end()) {
    apply_train_key(it->first, it->second, train);
  }
}

void save_checkpoint(const std::string& path, const FusionNet& net) {
  NamedTensors entries;
  for (const auto& [name, v] : net.parameters().entries()) entries.emplace_back(name, v.value());
  write_tensor_file(path, entries);
  write_key_values(path + ".manifest", network_config_to_key_values(net.config()));
}

FusionNet load_checkpoint(const std::string& path) {
  const NetworkConfig cfg = network_config_from_key_values(read_key_values(path + ".manifest"));
  const NamedTensors entries = read_tensor_file(path);
  FusionNet net(cfg, 0);
  if (entries.size() != net.parameters().size()) {
    throw IoError(IoErrorKind::kBadShape, "checkpoint holds " + std::to_string(entries.size()) +
                                              " tensors, network has " +
                                              std::to_string(net.parameters().size()));
  }
  for (const auto& [name, param] : net.parameters().entries()) {
    const Tensor& t = find_entry(entries, name);
    if (t.shape() != param.shape()) {
      throw IoError(IoErrorKind::kBadShape, "'" + name + "' is " + to_string(t.shape()) +
                                                ", expected " + to_string(param.shape()));
    }
    Var p = param;
    p.mutable_value() = t;
  }
  return net;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Record& Record::add(std::string_view key, std::string_view value) {
  if (!line_.empty()) line_ += '\t';
  line_.append(key);
  line_ += '=';
  line_.append(value);
  return *this;
}

Record& Record::add(std::string_view key, double value) { return add(key, format_double(value)); }

Record& Record::add(std::string_view key, std::uint64_t value) {
  return add(key, std::string_view(std::to_string(value)));
}

Record& Record::add(std::string_view key, std::int64_t value) {
  return add(key, std::string_view(std::to_string(value)));
}

std::vector<std::string> write_band_pgms(const Tensor& image, const std::string& prefix) {
  if (image.order() != 3) throw ShapeError("band dump expects H x W x L, got " + to_string(image.shape()));
  const std::size_t h = image.dim(0), w = image.dim(1), l = image.dim(2);
  std::vector<std::string> paths;
  for (std::size_t b = 0; b < l; ++b) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_band%02zu.pgm", b);
    std::string bytes = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    for (std::size_t p = 0; p < h * w; ++p) {
      const double v = std::clamp(image[p * l + b], 0.0, 1.0);
      bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
    paths.push_back(prefix + suffix);
    write_file(paths.back(), bytes);
  }
  return paths;
}

}  // namespace ada3d
