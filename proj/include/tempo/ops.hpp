// Copyright 2026 The Tempo Authors. All Rights Reserved.
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

// Forward and hand-derived backward passes for the dense primitives the
// model is built from. Every backward takes the forward inputs (and, where
// cheaper, the forward output) plus the upstream gradient.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "tempo/tensor.hpp"

namespace tempo {

// ---------------------------------------------------------------------------
// conv2d
// ---------------------------------------------------------------------------

struct Conv2dOptions {
  std::size_t stride = 1;
  std::size_t pad = 0;
};

struct Conv2dGrads {
  Tensor input;
  Tensor kernel;
  Tensor bias;
};

namespace detail {

struct ConvGeometry {
  std::size_t n, cin, h, w;
  std::size_t cout, kh, kw;
  std::size_t stride, pad;
  std::size_t oh, ow;

  std::size_t patch() const { return cin * kh * kw; }
  std::size_t out_plane() const { return oh * ow; }
  bool pointwise() const { return kh == 1 && kw == 1 && stride == 1 && pad == 0; }
};

inline ConvGeometry conv_geometry(const Tensor& input, const Tensor& kernel,
                                  const Tensor& bias, const Conv2dOptions& opt) {
  require(input.rank() == 4, "conv2d: input must be [N,C,H,W], got ",
          shape_str(input.dims()));
  require(kernel.rank() == 4, "conv2d: kernel must be [C_out,C_in,kH,kW], got ",
          shape_str(kernel.dims()));
  require(opt.stride >= 1, "conv2d: stride must be positive");
  ConvGeometry g{};
  g.n = input.dim(0);
  g.cin = input.dim(1);
  g.h = input.dim(2);
  g.w = input.dim(3);
  g.cout = kernel.dim(0);
  g.kh = kernel.dim(2);
  g.kw = kernel.dim(3);
  g.stride = opt.stride;
  g.pad = opt.pad;
  require(kernel.dim(1) == g.cin, "conv2d: channel axis mismatch, input has ",
          g.cin, " channels but kernel expects ", kernel.dim(1));
  require(bias.rank() == 1 && bias.dim(0) == g.cout,
          "conv2d: bias axis mismatch, expected [", g.cout, "] got ",
          shape_str(bias.dims()));
  require(g.h + 2 * g.pad >= g.kh, "conv2d: height axis too small (H=", g.h,
          ", pad=", g.pad, ", kH=", g.kh, ")");
  require(g.w + 2 * g.pad >= g.kw, "conv2d: width axis too small (W=", g.w,
          ", pad=", g.pad, ", kW=", g.kw, ")");
  g.oh = (g.h + 2 * g.pad - g.kh) / g.stride + 1;
  g.ow = (g.w + 2 * g.pad - g.kw) / g.stride + 1;
  return g;
}

// col is [cin*kh*kw, oh*ow]
inline void im2col(const ConvGeometry& g, const double* img, double* col) {
  const std::size_t plane = g.out_plane();
  std::size_t row = 0;
  for (std::size_t c = 0; c < g.cin; ++c) {
    const double* src = img + c * g.h * g.w;
    for (std::size_t ki = 0; ki < g.kh; ++ki) {
      for (std::size_t kj = 0; kj < g.kw; ++kj, ++row) {
        double* dst = col + row * plane;
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + ki) -
                                    static_cast<std::ptrdiff_t>(g.pad);
          double* d = dst + oy * g.ow;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
            for (std::size_t ox = 0; ox < g.ow; ++ox) d[ox] = 0.0;
            continue;
          }
          const double* s = src + static_cast<std::size_t>(iy) * g.w;
          for (std::size_t ox = 0; ox < g.ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.stride + kj) -
                                      static_cast<std::ptrdiff_t>(g.pad);
            d[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w))
                        ? 0.0
                        : s[static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
}

// Scatter-add of col back onto an image. Inverse access pattern of im2col.
inline void col2im_add(const ConvGeometry& g, const double* col, double* img) {
  const std::size_t plane = g.out_plane();
  std::size_t row = 0;
  for (std::size_t c = 0; c < g.cin; ++c) {
    double* dst = img + c * g.h * g.w;
    for (std::size_t ki = 0; ki < g.kh; ++ki) {
      for (std::size_t kj = 0; kj < g.kw; ++kj, ++row) {
        const double* src = col + row * plane;
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + ki) -
                                    static_cast<std::ptrdiff_t>(g.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          double* d = dst + static_cast<std::size_t>(iy) * g.w;
          const double* s = src + oy * g.ow;
          for (std::size_t ox = 0; ox < g.ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.stride + kj) -
                                      static_cast<std::ptrdiff_t>(g.pad);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w))
              d[static_cast<std::size_t>(ix)] += s[ox];
          }
        }
      }
    }
  }
}

inline void axpy(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Four running partial sums, combined in a fixed order.
inline double dot(std::size_t n, const double* x, const double* y) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace detail

/// Cross-correlation of [N,C_in,H,W] with [C_out,C_in,kH,kW] plus bias.
/// Output spatial extent is floor((H + 2*pad - kH) / stride) + 1.
inline Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
                     const Conv2dOptions& opt = {}) {
  const auto g = detail::conv_geometry(input, kernel, bias, opt);
  Tensor out({g.n, g.cout, g.oh, g.ow});
  const std::size_t plane = g.out_plane();
  const std::size_t patch = g.patch();
  std::vector<double> col(g.pointwise() ? 0 : patch * plane);
  for (std::size_t n = 0; n < g.n; ++n) {
    const double* img = input.data() + n * g.cin * g.h * g.w;
    const double* cols = img;
    if (!g.pointwise()) {
      detail::im2col(g, img, col.data());
      cols = col.data();
    }
    double* o = out.data() + n * g.cout * plane;
    for (std::size_t co = 0; co < g.cout; ++co) {
      double* orow = o + co * plane;
      for (std::size_t p = 0; p < plane; ++p) orow[p] = bias[co];
      const double* krow = kernel.data() + co * patch;
      for (std::size_t r = 0; r < patch; ++r)
        detail::axpy(plane, krow[r], cols + r * plane, orow);
    }
  }
  return out;
}

inline Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernel,
                                   const Tensor& grad_out,
                                   const Conv2dOptions& opt = {}) {
  const Tensor bias_probe({kernel.dim(0)});
  const auto g = detail::conv_geometry(input, kernel, bias_probe, opt);
  require(grad_out.dims() == Shape{g.n, g.cout, g.oh, g.ow},
          "conv2d_backward: grad_out shape ", shape_str(grad_out.dims()),
          " does not match output [", g.n, ",", g.cout, ",", g.oh, ",", g.ow, "]");
  Conv2dGrads grads{Tensor(input.dims()), Tensor(kernel.dims()), Tensor({g.cout})};
  const std::size_t plane = g.out_plane();
  const std::size_t patch = g.patch();
  std::vector<double> col(g.pointwise() ? 0 : patch * plane);
  std::vector<double> dcol(patch * plane);
  for (std::size_t n = 0; n < g.n; ++n) {
    const double* img = input.data() + n * g.cin * g.h * g.w;
    const double* cols = img;
    if (!g.pointwise()) {
      detail::im2col(g, img, col.data());
      cols = col.data();
    }
    const double* go = grad_out.data() + n * g.cout * plane;
    std::fill(dcol.begin(), dcol.end(), 0.0);
    for (std::size_t co = 0; co < g.cout; ++co) {
      const double* grow = go + co * plane;
      double bsum = 0.0;
      for (std::size_t p = 0; p < plane; ++p) bsum += grow[p];
      grads.bias[co] += bsum;
      double* dk = grads.kernel.data() + co * patch;
      const double* krow = kernel.data() + co * patch;
      for (std::size_t r = 0; r < patch; ++r) {
        dk[r] += detail::dot(plane, grow, cols + r * plane);
        detail::axpy(plane, krow[r], grow, dcol.data() + r * plane);
      }
    }
    double* dimg = grads.input.data() + n * g.cin * g.h * g.w;
    if (g.pointwise()) {
      for (std::size_t i = 0; i < patch * plane; ++i) dimg[i] += dcol[i];
    } else {
      detail::col2im_add(g, dcol.data(), dimg);
    }
  }
  return grads;
}

// ---------------------------------------------------------------------------
// linear
// ---------------------------------------------------------------------------

struct LinearGrads {
  Tensor input;
  Tensor weight;
  Tensor bias;
};

/// out[n,k] = sum_d input[n,d] * weight[k,d] + bias[k]
inline Tensor linear(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  require(input.rank() == 2, "linear: input must be [N,D], got ", shape_str(input.dims()));
  require(weight.rank() == 2, "linear: weight must be [K,D], got ",
          shape_str(weight.dims()));
  const std::size_t n = input.dim(0), d = input.dim(1), k = weight.dim(0);
  require(weight.dim(1) == d, "linear: feature axis mismatch, input has ", d,
          " features but weight expects ", weight.dim(1));
  require(bias.rank() == 1 && bias.dim(0) == k, "linear: bias must be [", k, "], got ",
          shape_str(bias.dims()));
  Tensor out({n, k});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      out[i * k + j] =
          detail::dot(d, input.data() + i * d, weight.data() + j * d) + bias[j];
  return out;
}

inline LinearGrads linear_backward(const Tensor& input, const Tensor& weight,
                                   const Tensor& grad_out) {
  const std::size_t n = input.dim(0), d = input.dim(1), k = weight.dim(0);
  require(grad_out.dims() == Shape{n, k}, "linear_backward: grad_out shape ",
          shape_str(grad_out.dims()), " expected [", n, ",", k, "]");
  LinearGrads g{Tensor(input.dims()), Tensor(weight.dims()), Tensor({k})};
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = input.data() + i * d;
    double* dx = g.input.data() + i * d;
    for (std::size_t j = 0; j < k; ++j) {
      const double go = grad_out[i * k + j];
      g.bias[j] += go;
      detail::axpy(d, go, x, g.weight.data() + j * d);
      detail::axpy(d, go, weight.data() + j * d, dx);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// activations
// ---------------------------------------------------------------------------

enum class Activation { relu, sigmoid, tanh };

inline std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "?";
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

inline Tensor activation(const Tensor& input, Activation kind) {
  Tensor out(input.dims());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double x = input[i];
    switch (kind) {
      case Activation::relu: out[i] = x > 0.0 ? x : 0.0; break;
      case Activation::sigmoid: out[i] = sigmoid(x); break;
      case Activation::tanh: out[i] = std::tanh(x); break;
    }
  }
  return out;
}

/// `output` must be activation(input, kind).
inline Tensor activation_backward(const Tensor& input, const Tensor& output,
                                  const Tensor& grad_out, Activation kind) {
  require(input.dims() == grad_out.dims() && output.dims() == grad_out.dims(),
          "activation_backward: shape mismatch");
  Tensor g(input.dims());
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double y = output[i];
    switch (kind) {
      case Activation::relu: g[i] = input[i] > 0.0 ? grad_out[i] : 0.0; break;
      case Activation::sigmoid: g[i] = grad_out[i] * y * (1.0 - y); break;
      case Activation::tanh: g[i] = grad_out[i] * (1.0 - y * y); break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// pooling
// ---------------------------------------------------------------------------

/// [N,T,C,H,W] -> [N,T,C], mean over the two spatial axes.
inline Tensor global_avg_pool_spatial(const Tensor& input) {
  require(input.rank() == 5, "global_avg_pool_spatial: input must be [N,T,C,H,W], got ",
          shape_str(input.dims()));
  const std::size_t hw = input.dim(3) * input.dim(4);
  require(hw >= 1, "global_avg_pool_spatial: empty spatial extent");
  Tensor out({input.dim(0), input.dim(1), input.dim(2)});
  const double inv = 1.0 / static_cast<double>(hw);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double* p = input.data() + i * hw;
    double s = 0.0;
    for (std::size_t j = 0; j < hw; ++j) s += p[j];
    out[i] = hw == 1 ? s : s * inv;
  }
  return out;
}

inline Tensor global_avg_pool_spatial_backward(const Shape& input_dims,
                                               const Tensor& grad_out) {
  require(input_dims.size() == 5 &&
              grad_out.dims() == Shape{input_dims[0], input_dims[1], input_dims[2]},
          "global_avg_pool_spatial_backward: shape mismatch");
  const std::size_t hw = input_dims[3] * input_dims[4];
  const double inv = 1.0 / static_cast<double>(hw);
  Tensor g(input_dims);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    const double v = hw == 1 ? grad_out[i] : grad_out[i] * inv;
    double* p = g.data() + i * hw;
    for (std::size_t j = 0; j < hw; ++j) p[j] = v;
  }
  return g;
}

// ---------------------------------------------------------------------------
// dropout
// ---------------------------------------------------------------------------

/// Per-element multipliers: 0 with probability `rate`, else 1/(1-rate).
inline Tensor dropout_mask(const Shape& dims, double rate, std::uint64_t seed) {
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0,1), got ", rate);
  Tensor mask(dims);
  std::mt19937_64 rng(mix_seed(seed));
  const double keep = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = uniform01(rng) < rate ? 0.0 : keep;
  return mask;
}

inline Tensor dropout(const Tensor& input, double rate, std::uint64_t seed, bool training) {
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0,1), got ", rate);
  if (!training || rate == 0.0) return input;
  Tensor out = dropout_mask(input.dims(), rate, seed);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= input[i];
  return out;
}

}  // namespace tempo
