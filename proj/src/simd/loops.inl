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


// Loop skeletons shared by every kernel variant. Each variant translation unit
// includes this file once and supplies an `Ops` policy with the two vector
// primitives; everything here has internal linkage so variants compiled with
// different instruction sets never merge.

#include <cstddef>

#include "ada3d/simd/kernels.hpp"

namespace ada3d::simd {
namespace {

using std::size_t;

struct Range {
  size_t lo;
  size_t hi;
};

// Cross-correlation taps t in [0, k) whose input p + t - k/2 lies inside [0, extent).
inline Range conv_taps(size_t p, size_t extent, size_t k) {
  const size_t r = k / 2;
  const size_t lo = p < r ? r - p : 0;
  const size_t lim = extent + r - p;
  return {lo, lim < k ? lim : k};
}

// Adaptive offsets o in [0, k) whose source p + r - o lies inside [0, extent).
inline Range adaptive_taps(size_t p, size_t extent, size_t k) {
  const size_t r = k / 2;
  const size_t lo = p + r + 1 > extent ? p + r + 1 - extent : 0;
  const size_t lim = p + r + 1;
  return {lo, lim < k ? lim : k};
}

template <class Ops>
void conv_forward_loop(const ConvGeometry& g, const double* x, const double* w,
                       const double* bias, double* y) {
  const size_t e0 = g.extent[0], e1 = g.extent[1], e2 = g.extent[2];
  const size_t k0 = g.kernel[0], k1 = g.kernel[1], k2 = g.kernel[2];
  const size_t cin = g.in_channels, cout = g.out_channels, groups = g.groups;
  const size_t cin_g = cin / groups, cout_g = cout / groups;
  const size_t tap_stride = cin_g * cout;
  for (size_t p0 = 0; p0 < e0; ++p0) {
    const Range r0 = conv_taps(p0, e0, k0);
    for (size_t p1 = 0; p1 < e1; ++p1) {
      const Range r1 = conv_taps(p1, e1, k1);
      for (size_t p2 = 0; p2 < e2; ++p2) {
        const Range r2 = conv_taps(p2, e2, k2);
        double* yr = y + ((p0 * e1 + p1) * e2 + p2) * cout;
        for (size_t co = 0; co < cout; ++co) yr[co] = bias ? bias[co] : 0.0;
        for (size_t t0 = r0.lo; t0 < r0.hi; ++t0) {
          const size_t q0 = p0 + t0 - k0 / 2;
          for (size_t t1 = r1.lo; t1 < r1.hi; ++t1) {
            const size_t q1 = p1 + t1 - k1 / 2;
            for (size_t t2 = r2.lo; t2 < r2.hi; ++t2) {
              const size_t q2 = p2 + t2 - k2 / 2;
              const double* xr = x + ((q0 * e1 + q1) * e2 + q2) * cin;
              const double* wt = w + ((t0 * k1 + t1) * k2 + t2) * tap_stride;
              for (size_t gr = 0; gr < groups; ++gr) {
                for (size_t ci = 0; ci < cin_g; ++ci) {
                  Ops::axpy(cout_g, xr[gr * cin_g + ci], wt + ci * cout + gr * cout_g,
                            yr + gr * cout_g);
                }
              }
            }
          }
        }
      }
    }
  }
}

template <class Ops>
void conv_backward_input_loop(const ConvGeometry& g, const double* wt, const double* dy,
                              double* dx) {
  const size_t e0 = g.extent[0], e1 = g.extent[1], e2 = g.extent[2];
  const size_t k0 = g.kernel[0], k1 = g.kernel[1], k2 = g.kernel[2];
  const size_t cin = g.in_channels, cout = g.out_channels, groups = g.groups;
  const size_t cin_g = cin / groups, cout_g = cout / groups;
  const size_t tap_stride = cout * cin_g;
  for (size_t p0 = 0; p0 < e0; ++p0) {
    const Range r0 = conv_taps(p0, e0, k0);
    for (size_t p1 = 0; p1 < e1; ++p1) {
      const Range r1 = conv_taps(p1, e1, k1);
      for (size_t p2 = 0; p2 < e2; ++p2) {
        const Range r2 = conv_taps(p2, e2, k2);
        const double* dyr = dy + ((p0 * e1 + p1) * e2 + p2) * cout;
        for (size_t t0 = r0.lo; t0 < r0.hi; ++t0) {
          const size_t q0 = p0 + t0 - k0 / 2;
          for (size_t t1 = r1.lo; t1 < r1.hi; ++t1) {
            const size_t q1 = p1 + t1 - k1 / 2;
            for (size_t t2 = r2.lo; t2 < r2.hi; ++t2) {
              const size_t q2 = p2 + t2 - k2 / 2;
              double* dxr = dx + ((q0 * e1 + q1) * e2 + q2) * cin;
              const double* wtap = wt + ((t0 * k1 + t1) * k2 + t2) * tap_stride;
              for (size_t gr = 0; gr < groups; ++gr) {
                for (size_t co = gr * cout_g; co < (gr + 1) * cout_g; ++co) {
                  Ops::axpy(cin_g, dyr[co], wtap + co * cin_g, dxr + gr * cin_g);
                }
              }
            }
          }
        }
      }
    }
  }
}

template <class Ops>
void conv_backward_weight_loop(const ConvGeometry& g, const double* x, const double* dy,
                               double* dw) {
  const size_t e0 = g.extent[0], e1 = g.extent[1], e2 = g.extent[2];
  const size_t k0 = g.kernel[0], k1 = g.kernel[1], k2 = g.kernel[2];
  const size_t cin = g.in_channels, cout = g.out_channels, groups = g.groups;
  const size_t cin_g = cin / groups, cout_g = cout / groups;
  const size_t tap_stride = cin_g * cout;
  for (size_t p0 = 0; p0 < e0; ++p0) {
    const Range r0 = conv_taps(p0, e0, k0);
    for (size_t p1 = 0; p1 < e1; ++p1) {
      const Range r1 = conv_taps(p1, e1, k1);
      for (size_t p2 = 0; p2 < e2; ++p2) {
        const Range r2 = conv_taps(p2, e2, k2);
        const double* dyr = dy + ((p0 * e1 + p1) * e2 + p2) * cout;
        for (size_t t0 = r0.lo; t0 < r0.hi; ++t0) {
          const size_t q0 = p0 + t0 - k0 / 2;
          for (size_t t1 = r1.lo; t1 < r1.hi; ++t1) {
            const size_t q1 = p1 + t1 - k1 / 2;
            for (size_t t2 = r2.lo; t2 < r2.hi; ++t2) {
              const size_t q2 = p2 + t2 - k2 / 2;
              const double* xr = x + ((q0 * e1 + q1) * e2 + q2) * cin;
              double* dwt = dw + ((t0 * k1 + t1) * k2 + t2) * tap_stride;
              for (size_t gr = 0; gr < groups; ++gr) {
                for (size_t ci = 0; ci < cin_g; ++ci) {
                  Ops::axpy(cout_g, xr[gr * cin_g + ci], dyr + gr * cout_g,
                            dwt + ci * cout + gr * cout_g);
                }
              }
            }
          }
        }
      }
    }
  }
}

template <class Ops>
void adaptive_forward_loop(const AdaptiveGeometry& g, const double* fb, const double* kernels,
                           const double* d, double* out) {
  const size_t e0 = g.extent[0], e1 = g.extent[1], e2 = g.extent[2];
  const size_t c = g.channels, k = g.k, k3 = k * k * k;
  for (size_t p0 = 0; p0 < e0; ++p0) {
    const Range r0 = adaptive_taps(p0, e0, k);
    for (size_t p1 = 0; p1 < e1; ++p1) {
      const Range r1 = adaptive_taps(p1, e1, k);
      for (size_t p2 = 0; p2 < e2; ++p2) {
        const Range r2 = adaptive_taps(p2, e2, k);
        const size_t i = (p0 * e1 + p1) * e2 + p2;
        double* outr = out + i * c;
        const double* ki = kernels + i * c * k3;
        for (size_t ch = 0; ch < c; ++ch) outr[ch] = d ? d[i * c + ch] : 0.0;
        for (size_t o0 = r0.lo; o0 < r0.hi; ++o0) {
          const size_t j0 = p0 + k / 2 - o0;
          for (size_t o1 = r1.lo; o1 < r1.hi; ++o1) {
            const size_t j1 = p1 + k / 2 - o1;
            for (size_t o2 = r2.lo; o2 < r2.hi; ++o2) {
              const size_t j2 = p2 + k / 2 - o2;
              const size_t t = (o0 * k + o1) * k + o2;
              Ops::strided_mac(c, ki + t, k3, fb + ((j0 * e1 + j1) * e2 + j2) * c, outr);
            }
          }
        }
      }
    }
  }
}

template <class Ops>
void adaptive_backward_loop(const AdaptiveGeometry& g, const double* fb, const double* kernels,
                            const double* dout, double* dfb, double* dkernels) {
  const size_t e0 = g.extent[0], e1 = g.extent[1], e2 = g.extent[2];
  const size_t c = g.channels, k = g.k, k3 = k * k * k;
  for (size_t p0 = 0; p0 < e0; ++p0) {
    const Range r0 = adaptive_taps(p0, e0, k);
    for (size_t p1 = 0; p1 < e1; ++p1) {
      const Range r1 = adaptive_taps(p1, e1, k);
      for (size_t p2 = 0; p2 < e2; ++p2) {
        const Range r2 = adaptive_taps(p2, e2, k);
        const size_t i = (p0 * e1 + p1) * e2 + p2;
        const double* doutr = dout + i * c;
        const double* ki = kernels + i * c * k3;
        double* dki = dkernels ? dkernels + i * c * k3 : nullptr;
        if (dki) {
          for (size_t n = 0; n < c * k3; ++n) dki[n] = 0.0;
        }
        for (size_t o0 = r0.lo; o0 < r0.hi; ++o0) {
          const size_t j0 = p0 + k / 2 - o0;
          for (size_t o1 = r1.lo; o1 < r1.hi; ++o1) {
            const size_t j1 = p1 + k / 2 - o1;
            for (size_t o2 = r2.lo; o2 < r2.hi; ++o2) {
              const size_t j2 = p2 + k / 2 - o2;
              const size_t t = (o0 * k + o1) * k + o2;
              const size_t j = (j0 * e1 + j1) * e2 + j2;
              if (dfb) Ops::strided_mac(c, ki + t, k3, doutr, dfb + j * c);
              if (dki) {
                const double* fbr = fb + j * c;
                for (size_t ch = 0; ch < c; ++ch) dki[ch * k3 + t] = doutr[ch] * fbr[ch];
              }
            }
          }
        }
      }
    }
  }
}

template <class Ops>
constexpr KernelTable make_table(const char* name) {
  return KernelTable{name,
                     &conv_forward_loop<Ops>,
                     &conv_backward_input_loop<Ops>,
                     &conv_backward_weight_loop<Ops>,
                     &adaptive_forward_loop<Ops>,
                     &adaptive_backward_loop<Ops>};
}

}  // namespace
}  // namespace ada3d::simd
