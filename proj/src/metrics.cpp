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


#include "ada3d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ada3d/error.hpp"

namespace ada3d {
namespace {

struct Dims {
  std::size_t h, w, l;
};

Dims image_dims(const Tensor& est, const Tensor& ref, const char* name) {
  if (est.shape() != ref.shape() || est.order() != 3) {
    throw ShapeError(std::string(name) + ": expected matching H x W x L images, got " +
                     to_string(est.shape()) + " and " + to_string(ref.shape()));
  }
  return {est.dim(0), est.dim(1), est.dim(2)};
}

std::vector<double> band_mse(const Tensor& est, const Tensor& ref, const Dims& d) {
  std::vector<double> mse(d.l, 0.0);
  const std::size_t n = d.h * d.w;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t b = 0; b < d.l; ++b) {
      const double e = est[p * d.l + b] - ref[p * d.l + b];
      mse[b] += e * e;
    }
  }
  for (double& m : mse) m /= static_cast<double>(n);
  return mse;
}

std::vector<double> gaussian_window(std::size_t size, double sigma) {
  std::vector<double> g(size);
  const double c = static_cast<double>(size / 2);
  double total = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    const double t = static_cast<double>(i) - c;
    g[i] = std::exp(-t * t / (2.0 * sigma * sigma));
    total += g[i];
  }
  for (double& v : g) v /= total;
  return g;
}

// Separable "valid" filtering of an h x w plane.
std::vector<double> filter_valid(const std::vector<double>& img, std::size_t h, std::size_t w,
                                 const std::vector<double>& g) {
  const std::size_t n = g.size();
  const std::size_t ow = w - n + 1, oh = h - n + 1;
  std::vector<double> tmp(h * ow, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += g[i] * img[y * w + x + i];
      tmp[y * ow + x] = s;
    }
  }
  std::vector<double> out(oh * ow, 0.0);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += g[i] * tmp[(y + i) * ow + x];
      out[y * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double psnr(const Tensor& est, const Tensor& ref, double peak) {
  const Dims d = image_dims(est, ref, "psnr");
  if (!(peak > 0.0)) throw ConfigError("psnr: peak must be positive");
  const auto mse = band_mse(est, ref, d);
  double total = 0.0;
  for (double m : mse) {
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    total += 10.0 * std::log10(peak * peak / m);
  }
  return total / static_cast<double>(d.l);
}

SamResult sam(const Tensor& est, const Tensor& ref) {
  const Dims d = image_dims(est, ref, "sam");
  SamResult r;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t p = 0; p < d.h * d.w; ++p) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t b = 0; b < d.l; ++b) {
      const double a = est[p * d.l + b], c = ref[p * d.l + b];
      dot += a * c;
      na += a * a;
      nb += c * c;
    }
    if (na == 0.0 || nb == 0.0) {
      ++r.excluded;
      continue;
    }
    const double cosine = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    total += std::acos(cosine);
    ++counted;
  }
  r.degrees = counted ? total / static_cast<double>(counted) * 180.0 / std::numbers::pi : 0.0;
  return r;
}

ErgasResult ergas(const Tensor& est, const Tensor& ref, double r, ErgasMean convention) {
  const Dims d = image_dims(est, ref, "ergas");
  if (!(r > 0.0)) throw ConfigError("ergas: scale ratio must be positive");
  const auto mse = band_mse(est, ref, d);
  const std::size_t n = d.h * d.w;
  std::vector<double> mu2(d.l, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t b = 0; b < d.l; ++b) {
      const double v = ref[p * d.l + b];
      mu2[b] += convention == ErgasMean::kMeanSquare ? v * v : v;
    }
  }
  ErgasResult out;
  double acc = 0.0;
  for (std::size_t b = 0; b < d.l; ++b) {
    double m = mu2[b] / static_cast<double>(n);
    if (convention == ErgasMean::kSquaredMean) m = m * m;
    if (m < kErgasEpsilon) {
      m = kErgasEpsilon;
      ++out.guarded_bands;
    }
    acc += mse[b] / m;
  }
  out.value = 100.0 / r * std::sqrt(acc / static_cast<double>(d.l));
  return out;
}

CcResult cc(const Tensor& est, const Tensor& ref) {
  const Dims d = image_dims(est, ref, "cc");
  const std::size_t n = d.h * d.w;
  CcResult out;
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t b = 0; b < d.l; ++b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      ma += est[p * d.l + b];
      mb += ref[p * d.l + b];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      const double a = est[p * d.l + b] - ma, c = ref[p * d.l + b] - mb;
      sab += a * c;
      saa += a * a;
      sbb += c * c;
    }
    if (saa == 0.0 || sbb == 0.0) {
      ++out.excluded;
      continue;
    }
    total += sab / std::sqrt(saa * sbb);
    ++counted;
  }
  out.value = counted ? total / static_cast<double>(counted)
                      : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double ssim(const Tensor& est, const Tensor& ref, double peak, std::size_t window, double sigma,
            double k1, double k2) {
  const Dims d = image_dims(est, ref, "ssim");
  std::size_t size = std::min({window, d.h, d.w});
  if (size % 2 == 0) --size;
  if (size == 0) throw ShapeError("ssim: empty window");
  const auto g = gaussian_window(size, sigma);
  const double c1 = (k1 * peak) * (k1 * peak), c2 = (k2 * peak) * (k2 * peak);
  const std::size_t n = d.h * d.w;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  double total = 0.0;
  for (std::size_t b = 0; b < d.l; ++b) {
    for (std::size_t p = 0; p < n; ++p) {
      x[p] = est[p * d.l + b];
      y[p] = ref[p * d.l + b];
      xx[p] = x[p] * x[p];
      yy[p] = y[p] * y[p];
      xy[p] = x[p] * y[p];
    }
    const auto mx = filter_valid(x, d.h, d.w, g), my = filter_valid(y, d.h, d.w, g);
    const auto sxx = filter_valid(xx, d.h, d.w, g), syy = filter_valid(yy, d.h, d.w, g);
    const auto sxy = filter_valid(xy, d.h, d.w, g);
    double band = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double vx = sxx[i] - mx[i] * mx[i];
      const double vy = syy[i] - my[i] * my[i];
      const double cov = sxy[i] - mx[i] * my[i];
      band += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
              ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    total += band / static_cast<double>(mx.size());
  }
  return total / static_cast<double>(d.l);
}

MetricReport evaluate_metrics(const Tensor& est, const Tensor& ref, double peak, double r,
                              ErgasMean convention) {
  MetricReport m;
  m.psnr = std::min(psnr(est, ref, peak), kPsnrCap);
  const CcResult c = cc(est, ref);
  m.cc = c.value;
  m.cc_excluded = c.excluded;
  m.ssim = ssim(est, ref, peak);
  const SamResult s = sam(est, ref);
  m.sam = s.degrees;
  m.sam_excluded = s.excluded;
  const ErgasResult e = ergas(est, ref, r, convention);
  m.ergas = e.value;
  m.ergas_guarded = e.guarded_bands;
  return m;
}

}  // namespace ada3d
