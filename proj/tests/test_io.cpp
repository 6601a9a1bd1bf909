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
#include <fstream>
#include <limits>
#include <sstream>

#include "ada3d/error.hpp"
#include "ada3d/io.hpp"
#include "ada3d/random.hpp"

using namespace ada3d;

namespace {

std::uint32_t le32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (std::size_t b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + b])) << (8 * b);
  return v;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IoErrorKind decode_kind(std::string_view bytes) {
  try {
    decode_container(bytes);
  } catch (const IoError& e) {
    return e.kind();
  }
  FAIL("decode succeeded");
  return IoErrorKind::kOpen;
}

NamedTensors random_entries(Rng& rng) {
  NamedTensors e;
  const std::size_t n = 1 + rng.below(4);
  for (std::size_t i = 0; i < n; ++i) {
    Shape s;
    const std::size_t order = 1 + rng.below(4);
    for (std::size_t d = 0; d < order; ++d) s.push_back(1 + rng.below(5));
    e.emplace_back("t" + std::to_string(i), random_normal(s, rng));
  }
  return e;
}

}  // namespace

TEST_CASE("container layout") {
  const std::string empty = encode_container({});
  CHECK(empty.size() == kContainerHeaderSize);
  CHECK(empty.substr(0, 4) == "ATNS");
  CHECK(static_cast<unsigned char>(empty[4]) == kContainerVersion);
  CHECK(le32(empty, 6) == 0);
  CHECK(le32(empty, 10) == 0);  // CRC-32 of nothing
  CHECK(decode_container(empty).empty());

  const Tensor t(Shape{2, 2}, std::vector<double>{1.0, -2.5, 3.25, 0.0});
  const std::string one = encode_container({{"m", t}});
  // header + u16 name length + name + dtype + ndim + 2 u32 dims + 4 doubles
  CHECK(one.size() == 14 + 2 + 1 + 1 + 1 + 8 + 32);
  CHECK(le32(one, 6) == 1);
  CHECK(le32(one, 10) == checksum(std::string_view(one).substr(14)));
  CHECK(checksum("123456789") == 0xCBF43926u);
  const NamedTensors back = decode_container(one);
  REQUIRE(back.size() == 1);
  CHECK(back[0].first == "m");
  CHECK(back[0].second == t);
}

TEST_CASE("random roundtrips are bit-exact") {
  Rng rng(81);
  for (int i = 0; i < 100; ++i) {
    const NamedTensors e = random_entries(rng);
    const NamedTensors back = decode_container(encode_container(e));
    REQUIRE(back.size() == e.size());
    for (std::size_t j = 0; j < e.size(); ++j) {
      CHECK(back[j].first == e[j].first);
      CHECK(std::memcmp(back[j].second.raw(), e[j].second.raw(), e[j].second.size() * 8) == 0);
      CHECK(back[j].second.shape() == e[j].second.shape());
    }
  }
  Tensor special(Shape{3}, std::vector<double>{-0.0, std::numeric_limits<double>::infinity(),
                                              std::numeric_limits<double>::denorm_min()});
  CHECK(std::signbit(decode_container(encode_container({{"s", special}}))[0].second[0]));
}

TEST_CASE("f32 storage rounds to float") {
  const Tensor t(Shape{3}, std::vector<double>{0.1, 1.0, -3.0e5});
  const NamedTensors back = decode_container(encode_container({{"f", t}}, Dtype::kF32));
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(back[0].second[i] == static_cast<double>(static_cast<float>(t[i])));
}

TEST_CASE("every corruption kind has its own error") {
  const Tensor t(Shape{2, 3}, 0.5);
  const std::string good = encode_container({{"a", t}, {"b", t}});
  std::string s;

  s = good; s[0] = 'X';
  CHECK(decode_kind(s) == IoErrorKind::kBadMagic);
  s = good; s[4] = 9;
  CHECK(decode_kind(s) == IoErrorKind::kBadVersion);
  CHECK(decode_kind(good.substr(0, 3)) == IoErrorKind::kTruncated);
  CHECK(decode_kind(good.substr(0, good.size() - 1)) == IoErrorKind::kTruncated);
  s = good; s[6] = 3;
  CHECK(decode_kind(s) == IoErrorKind::kTruncated);
  s = good; s[6] = 1;
  CHECK(decode_kind(s) == IoErrorKind::kTrailingBytes);
  CHECK(decode_kind(good + "x") == IoErrorKind::kTrailingBytes);
  // first entry: 14 header, 2 name length, 1 name, then dtype
  s = good; s[17] = 7;
  CHECK(decode_kind(s) == IoErrorKind::kUnknownDtype);
  s = good; std::memset(&s[19], 0, 4);
  CHECK(decode_kind(s) == IoErrorKind::kBadShape);
  s = good; s[16] = 'b';
  CHECK(decode_kind(s) == IoErrorKind::kParse);
  s = good; s[30] ^= 0x01;
  CHECK(decode_kind(s) == IoErrorKind::kChecksum);
  s = good; s[10] ^= 0x01;
  CHECK(decode_kind(s) == IoErrorKind::kChecksum);

  CHECK_THROWS_AS(find_entry(decode_container(good), "c"), IoError);
  try {
    read_tensor_file("/nonexistent/dir/file.atns");
    FAIL("no throw");
  } catch (const IoError& e) {
    CHECK(e.kind() == IoErrorKind::kOpen);
  }
}

TEST_CASE("fuzzed containers only raise typed errors") {
  Rng rng(82);
  std::size_t decoded = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::string original = encode_container(random_entries(rng));
    std::string s = original;
    const std::size_t flips = 1 + rng.below(3);
    for (std::size_t f = 0; f < flips; ++f) s[rng.below(s.size())] ^= static_cast<char>(1 + rng.below(255));
    if (rng.below(4) == 0) s.resize(rng.below(s.size()));
    if (s == original) continue;
    try {
      decode_container(s);
      ++decoded;
    } catch (const IoError&) {
    }
  }
  CHECK(decoded == 0);
}

TEST_CASE("file roundtrip") {
  Rng rng(83);
  const NamedTensors e = random_entries(rng);
  write_tensor_file("io_test_file.atns", e);
  const NamedTensors back = read_tensor_file("io_test_file.atns");
  CHECK(back.size() == e.size());
  CHECK(slurp("io_test_file.atns") == encode_container(e));
}

TEST_CASE("degradation of a constant scene") {
  const Tensor gt(Shape{8, 12, 3}, 0.4);
  const FusionSample s = degrade(gt, 1.3, {0.2, 0.3, 0.5});
  CHECK(s.pan.shape() == Shape{8, 12});
  CHECK(s.lr.shape() == Shape{2, 3, 3});
  for (double v : s.pan.data()) CHECK(v == doctest::Approx(0.4).epsilon(1e-14));
  for (double v : s.lr.data()) CHECK(v == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("degradation operators by hand") {
  Tensor x(Shape{2, 2, 1}, std::vector<double>{1.0, 2.0, 3.0, 6.0});
  CHECK(box_downsample(x, 2)[0] == 3.0);
  Tensor y(Shape{1, 1, 2}, std::vector<double>{1.0, 3.0});
  CHECK(weighted_band_average(y, {0.25, 0.75})[0] == 2.5);
  CHECK(gaussian_blur(x, 0.0) == x);
  // blur preserves the mean of a symmetric-padded ramp's centre
  Tensor ramp(Shape{1, 9});
  for (std::size_t i = 0; i < 9; ++i) ramp[i] = static_cast<double>(i);
  CHECK(gaussian_blur(ramp, 1.0)[4] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(box_downsample(Tensor(Shape{6, 6, 1}), 4), ShapeError);
}

TEST_CASE("synthetic dataset") {
  SyntheticDatasetSpec spec;
  spec.n_samples = 3;
  spec.height = 16;
  spec.width = 12;
  spec.bands = 5;
  const auto a = gen_synthetic_dataset(spec), b = gen_synthetic_dataset(spec);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].pan == b[i].pan);
    CHECK(a[i].lr == b[i].lr);
    CHECK(a[i].pan.shape() == Shape{16, 12});
    CHECK(a[i].lr.shape() == Shape{4, 3, 5});
    CHECK(a[i].gt->shape() == Shape{16, 12, 5});
    for (double v : a[i].gt->data()) CHECK((v >= 0.0 && v <= 1.0));
    // PAN is the band average of the ground truth
    for (std::size_t p = 0; p < 16 * 12; ++p) {
      double m = 0.0;
      for (std::size_t l = 0; l < 5; ++l) m += (*a[i].gt)[p * 5 + l];
      CHECK(a[i].pan[p] == doctest::Approx(m / 5.0).epsilon(1e-13));
    }
  }
  spec.seed = 2;
  CHECK(!(gen_synthetic_dataset(spec)[0].pan == a[0].pan));

  SyntheticDatasetSpec bad = spec;
  bad.height = 10;
  CHECK_THROWS_AS(gen_synthetic_dataset(bad), ConfigError);
  bad = spec;
  bad.pan_weights = {0.5, 0.5, 0.5, -0.5, 0.0};
  CHECK_THROWS_AS(gen_synthetic_dataset(bad), ConfigError);
  bad.pan_weights = {0.5, 0.5, 0.5, 0.0, 0.0};
  CHECK_THROWS_AS(gen_synthetic_dataset(bad), ConfigError);

  save_dataset("io_test_dataset.atns", a);
  const auto back = load_dataset("io_test_dataset.atns");
  REQUIRE(back.size() == 3);
  CHECK(*back[2].gt == *a[2].gt);
}

TEST_CASE("dataset normalization") {
  std::vector<FusionSample> s{{Tensor(Shape{4, 4}, 2.0), Tensor(Shape{1, 1, 2}, 4.0), Tensor(Shape{4, 4, 2}, 1.0)}};
  CHECK(normalize_dataset(s) == 4.0);
  CHECK(s[0].pan[0] == 0.5);
  CHECK(s[0].lr[0] == 1.0);
  CHECK((*s[0].gt)[0] == 0.25);
  CHECK(normalize_dataset(s) == 1.0);
  s[0].pan[3] = -1.0;
  CHECK_THROWS_AS(normalize_dataset(s), ShapeError);
}

TEST_CASE("key-value configuration") {
  std::istringstream in("# comment\nepochs = 12\n\nlearning_rate=2e-4\nhalve_every = 4\nspatial_channels = 6\n");
  const KeyValues kv = parse_key_values(in);
  CHECK(kv.at("epochs") == "12");
  NetworkConfig net;
  TrainConfig tc;
  apply_config(kv, net, tc);
  CHECK(tc.epochs == 12);
  CHECK(tc.learning_rate == 2e-4);
  CHECK(tc.halve_at == std::vector<std::size_t>{4, 8});
  CHECK(net.spatial_channels == 6);

  std::istringstream broken("epochs 12\n");
  CHECK_THROWS_AS(parse_key_values(broken), IoError);
  CHECK_THROWS_AS(apply_config({{"colour", "red"}}, net, tc), ConfigError);
  CHECK_THROWS_AS(apply_config({{"epochs", "many"}}, net, tc), ConfigError);
  CHECK_THROWS_AS(apply_config({{"ergas_mean", "median"}}, net, tc), ConfigError);

  const NetworkConfig p = NetworkConfig::preset("pansharpening", 4);
  CHECK(network_config_to_key_values(network_config_from_key_values(network_config_to_key_values(p))) ==
        network_config_to_key_values(p));
  KeyValues partial = network_config_to_key_values(p);
  partial.erase("alpha");
  CHECK_THROWS_AS(network_config_from_key_values(partial), IoError);
}

TEST_CASE("checkpoint errors") {
  NetworkConfig cfg;
  cfg.bands = 3;
  cfg.spatial_channels = 3;
  cfg.spectral_channels = 2;
  cfg.resblocks = 1;
  cfg.ada3d_blocks = 1;
  FusionNet net(cfg, 4);
  save_checkpoint("io_test_ckpt.atns", net);
  const FusionNet back = load_checkpoint("io_test_ckpt.atns");
  for (std::size_t i = 0; i < net.parameters().size(); ++i)
    CHECK(back.parameters().entries()[i].second.value() == net.parameters().entries()[i].second.value());

  NamedTensors entries = read_tensor_file("io_test_ckpt.atns");
  entries.pop_back();
  write_tensor_file("io_test_ckpt.atns", entries);
  CHECK_THROWS_AS(load_checkpoint("io_test_ckpt.atns"), IoError);
}

TEST_CASE("record formatting") {
  Record r;
  r.add("cmd", "eval").add("psnr", 31.25).add("n", std::uint64_t{16}).add("d", -3).add("lr", 1e-4);
  CHECK(r.str() == "cmd=eval\tpsnr=31.25\tn=16\td=-3\tlr=1e-04");
  CHECK(format_double(0.1) == "0.1");
}

TEST_CASE("band images") {
  Tensor img(Shape{2, 3, 2});
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = static_cast<double>(i) / 11.0;
  img[0] = -1.0;
  const auto paths = write_band_pgms(img, "io_test_img");
  REQUIRE(paths.size() == 2);
  CHECK(paths[1] == "io_test_img_band01.pgm");
  const std::string bytes = slurp(paths[1]);
  CHECK(bytes.substr(0, 11) == "P5\n3 2\n255\n");
  REQUIRE(bytes.size() == 17);
  CHECK(static_cast<unsigned char>(bytes[11]) == 23);   // round(1/11 * 255)
  CHECK(static_cast<unsigned char>(slurp(paths[0])[11]) == 0);
}
