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

// Temporal mixing operators over [N,T,C,H,W] feature maps:
//
//  * interlace: per-group fractional shift along T (two-tap linear
//    interpolation, zero padded) followed by per-frame reweighting.
//  * tsm_shift: fixed +1/-1 frame shift of a channel fraction.
//  * segment_consensus: mean over a segment axis.
//
// Sign convention: a positive offset o makes frame t read from t+o.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "tempo/tensor.hpp"

namespace tempo {

/// Contiguous, ordered, exhaustive channel intervals.
class GroupSpec {
 public:
  struct Range {
    std::size_t begin;
    std::size_t end;
  };

  GroupSpec() = default;

  explicit GroupSpec(std::vector<Range> ranges) : ranges_(std::move(ranges)) {
    require(!ranges_.empty(), "GroupSpec: at least one group required");
    std::size_t expect = 0;
    for (std::size_t g = 0; g < ranges_.size(); ++g) {
      require(ranges_[g].begin == expect, "GroupSpec: group ", g,
              " must start at channel ", expect, ", starts at ", ranges_[g].begin);
      require(ranges_[g].end > ranges_[g].begin, "GroupSpec: group ", g, " is empty");
      expect = ranges_[g].end;
    }
  }

  /// Splits C channels into G groups; the first C % G groups get one extra.
  static GroupSpec even(std::size_t channels, std::size_t groups) {
    require(groups >= 1, "GroupSpec: need at least one group");
    require(groups <= channels, "GroupSpec: ", groups, " groups exceed ", channels,
            " channels");
    std::vector<Range> r;
    const std::size_t base = channels / groups, extra = channels % groups;
    std::size_t c = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      const std::size_t len = base + (g < extra ? 1 : 0);
      r.push_back({c, c + len});
      c += len;
    }
    return GroupSpec(std::move(r));
  }

  std::size_t num_groups() const { return ranges_.size(); }
  std::size_t num_channels() const { return ranges_.empty() ? 0 : ranges_.back().end; }
  const Range& operator[](std::size_t g) const { return ranges_[g]; }
  const std::vector<Range>& ranges() const { return ranges_; }

 private:
  std::vector<Range> ranges_;
};

/// offsets: [N,G] in frames; weights: [N,G,T], nonnegative.
struct InterlaceParams {
  Tensor offsets;
  Tensor weights;
};

struct InterlaceGrads {
  Tensor input;
  Tensor offsets;
  Tensor weights;
};

namespace detail {

struct InterlaceLayout {
  std::size_t n, t, c, hw, g;
};

inline InterlaceLayout check_interlace(const Tensor& x, const GroupSpec& groups,
                                       const InterlaceParams& p, double max_offset) {
  require(x.rank() == 5, "interlace: input must be [N,T,C,H,W], got ",
          shape_str(x.dims()));
  InterlaceLayout l{x.dim(0), x.dim(1), x.dim(2), x.dim(3) * x.dim(4),
                    groups.num_groups()};
  require(l.t >= 1, "interlace: T must be at least 1");
  require(groups.num_channels() == l.c, "interlace: groups cover ",
          groups.num_channels(), " channels but input has ", l.c);
  require(p.offsets.dims() == Shape{l.n, l.g}, "interlace: offsets must be [", l.n, ",",
          l.g, "], got ", shape_str(p.offsets.dims()));
  require(p.weights.dims() == Shape{l.n, l.g, l.t}, "interlace: weights must be [", l.n,
          ",", l.g, ",", l.t, "], got ", shape_str(p.weights.dims()));
  for (std::size_t i = 0; i < p.offsets.size(); ++i)
    require(std::abs(p.offsets[i]) <= max_offset, "interlace: offset ", p.offsets[i],
            " exceeds max offset ", max_offset);
  for (std::size_t i = 0; i < p.weights.size(); ++i)
    require(p.weights[i] >= 0.0, "interlace: negative frame weight ", p.weights[i]);
  return l;
}

}  // namespace detail

/// y[t] = w[t] * ((1-a) * x[t+k] + a * x[t+k+1]) per group, with k = floor(o),
/// a = o - k and zeros outside [0, T-1].
inline Tensor interlace_forward(const Tensor& x, const GroupSpec& groups,
                                const InterlaceParams& params, double max_offset) {
  const auto l = detail::check_interlace(x, groups, params, max_offset);
  Tensor y(x.dims());
  const std::size_t frame = l.c * l.hw;
  const auto T = static_cast<std::ptrdiff_t>(l.t);
  for (std::size_t n = 0; n < l.n; ++n) {
    for (std::size_t g = 0; g < l.g; ++g) {
      const double o = params.offsets[n * l.g + g];
      const double kf = std::floor(o);
      const double a = o - kf;
      const auto k = static_cast<std::ptrdiff_t>(kf);
      const std::size_t c0 = groups[g].begin * l.hw;
      const std::size_t len = (groups[g].end - groups[g].begin) * l.hw;
      for (std::ptrdiff_t t = 0; t < T; ++t) {
        const double w = params.weights[(n * l.g + g) * l.t + static_cast<std::size_t>(t)];
        double* dst = y.data() + (n * l.t + static_cast<std::size_t>(t)) * frame + c0;
        const std::ptrdiff_t s0 = t + k, s1 = t + k + 1;
        const double* x0 = (s0 >= 0 && s0 < T)
                               ? x.data() + (n * l.t + static_cast<std::size_t>(s0)) * frame + c0
                               : nullptr;
        const double* x1 = (s1 >= 0 && s1 < T)
                               ? x.data() + (n * l.t + static_cast<std::size_t>(s1)) * frame + c0
                               : nullptr;
        for (std::size_t i = 0; i < len; ++i) {
          const double v0 = x0 ? x0[i] : 0.0;
          const double v1 = x1 ? x1[i] : 0.0;
          dst[i] = w * ((1.0 - a) * v0 + a * v1);
        }
      }
    }
  }
  return y;
}

/// Gradients w.r.t. input, offsets and weights. At integer offsets the
/// offset gradient is the one-sided derivative of the floor branch.
inline InterlaceGrads interlace_backward(const Tensor& x, const GroupSpec& groups,
                                         const InterlaceParams& params, double max_offset,
                                         const Tensor& grad_out) {
  const auto l = detail::check_interlace(x, groups, params, max_offset);
  require(grad_out.dims() == x.dims(), "interlace_backward: grad shape mismatch");
  InterlaceGrads g{Tensor(x.dims()), Tensor(params.offsets.dims()),
                   Tensor(params.weights.dims())};
  const std::size_t frame = l.c * l.hw;
  const auto T = static_cast<std::ptrdiff_t>(l.t);
  for (std::size_t n = 0; n < l.n; ++n) {
    for (std::size_t grp = 0; grp < l.g; ++grp) {
      const double o = params.offsets[n * l.g + grp];
      const double kf = std::floor(o);
      const double a = o - kf;
      const auto k = static_cast<std::ptrdiff_t>(kf);
      const std::size_t c0 = groups[grp].begin * l.hw;
      const std::size_t len = (groups[grp].end - groups[grp].begin) * l.hw;
      double doff = 0.0;
      for (std::ptrdiff_t t = 0; t < T; ++t) {
        const std::size_t widx = (n * l.g + grp) * l.t + static_cast<std::size_t>(t);
        const double w = params.weights[widx];
        const double* dy = grad_out.data() + (n * l.t + static_cast<std::size_t>(t)) * frame + c0;
        const std::ptrdiff_t s0 = t + k, s1 = t + k + 1;
        const bool in0 = s0 >= 0 && s0 < T, in1 = s1 >= 0 && s1 < T;
        const std::size_t off0 = in0 ? (n * l.t + static_cast<std::size_t>(s0)) * frame + c0 : 0;
        const std::size_t off1 = in1 ? (n * l.t + static_cast<std::size_t>(s1)) * frame + c0 : 0;
        double dw = 0.0, dd = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
          const double v0 = in0 ? x[off0 + i] : 0.0;
          const double v1 = in1 ? x[off1 + i] : 0.0;
          dw += dy[i] * ((1.0 - a) * v0 + a * v1);
          dd += dy[i] * (v1 - v0);
        }
        g.weights[widx] = dw;
        doff += w * dd;
        if (in0) {
          double* dx = g.input.data() + off0;
          const double c = w * (1.0 - a);
          for (std::size_t i = 0; i < len; ++i) dx[i] += c * dy[i];
        }
        if (in1) {
          double* dx = g.input.data() + off1;
          const double c = w * a;
          for (std::size_t i = 0; i < len; ++i) dx[i] += c * dy[i];
        }
      }
      g.offsets[n * l.g + grp] = doff;
    }
  }
  return g;
}

/// Fraction of channels shifted in each direction.
struct ShiftSpec {
  double fold = 0.125;

  std::size_t fold_channels(std::size_t channels) const {
    // Guard against 0.1 * 10 = 1.0000000000000002 style round-up.
    const double raw = static_cast<double>(channels) * fold;
    return static_cast<std::size_t>(std::ceil(raw - 1e-9));
  }

  void validate(std::size_t channels) const {
    require(fold > 0.0 && fold <= 0.5, "tsm: fold fraction must be in (0, 0.5], got ", fold);
    const std::size_t f = fold_channels(channels);
    require(f >= 1, "tsm: fold ", fold, " shifts no channels of ", channels);
    require(2 * f <= channels, "tsm: fold ", fold, " too large for ", channels,
            " channels (2*", f, " > ", channels, ")");
  }
};

namespace detail {

// direction +1: out[t] = in[t+1] on the first fold channels and in[t-1] on
// the next fold. direction -1 is the transpose.
inline Tensor tsm_apply(const Tensor& x, const ShiftSpec& spec, int direction) {
  require(x.rank() == 5, "tsm_shift: input must be [N,T,C,H,W], got ",
          shape_str(x.dims()));
  const std::size_t N = x.dim(0), T = x.dim(1), C = x.dim(2), hw = x.dim(3) * x.dim(4);
  spec.validate(C);
  const std::size_t fold = spec.fold_channels(C);
  const std::size_t frame = C * hw;
  Tensor y(x.dims());
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t t = 0; t < T; ++t) {
      double* dst = y.data() + (n * T + t) * frame;
      const double* cur = x.data() + (n * T + t) * frame;
      // "future" block reads t+dir, "past" block reads t-dir
      const std::ptrdiff_t fut = static_cast<std::ptrdiff_t>(t) + direction;
      const std::ptrdiff_t past = static_cast<std::ptrdiff_t>(t) - direction;
      const auto in_range = [T](std::ptrdiff_t s) {
        return s >= 0 && s < static_cast<std::ptrdiff_t>(T);
      };
      if (in_range(fut)) {
        const double* src = x.data() + (n * T + static_cast<std::size_t>(fut)) * frame;
        std::copy(src, src + fold * hw, dst);
      }
      if (in_range(past)) {
        const double* src =
            x.data() + (n * T + static_cast<std::size_t>(past)) * frame + fold * hw;
        std::copy(src, src + fold * hw, dst + fold * hw);
      }
      std::copy(cur + 2 * fold * hw, cur + frame, dst + 2 * fold * hw);
    }
  }
  return y;
}

}  // namespace detail

/// First ceil(C*fold) channels read frame t+1, the next ceil(C*fold) read
/// frame t-1, the rest pass through. Zero outside the clip.
inline Tensor tsm_shift(const Tensor& x, const ShiftSpec& spec) {
  return detail::tsm_apply(x, spec, +1);
}

inline Tensor tsm_shift_backward(const Tensor& grad_out, const ShiftSpec& spec) {
  return detail::tsm_apply(grad_out, spec, -1);
}

/// [N,K,C] -> [N,C], mean over the K segments.
inline Tensor segment_consensus(const Tensor& logits) {
  require(logits.rank() == 3, "segment_consensus: input must be [N,K,C], got ",
          shape_str(logits.dims()));
  const std::size_t N = logits.dim(0), K = logits.dim(1), C = logits.dim(2);
  require(K >= 1, "segment_consensus: K must be at least 1");
  Tensor out({N, C});
  std::vector<double> buf(K);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t k = 0; k < K; ++k) buf[k] = logits[(n * K + k) * C + c];
      // summing in sorted order makes the result exactly order independent
      std::sort(buf.begin(), buf.end());
      double s = 0.0;
      for (double v : buf) s += v;
      out[n * C + c] = K == 1 ? s : s / static_cast<double>(K);
    }
  }
  return out;
}

inline Tensor segment_consensus_backward(std::size_t segments, const Tensor& grad_out) {
  require(grad_out.rank() == 2 && segments >= 1, "segment_consensus_backward: bad shape");
  const std::size_t N = grad_out.dim(0), C = grad_out.dim(1);
  Tensor g({N, segments, C});
  const double inv = 1.0 / static_cast<double>(segments);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t k = 0; k < segments; ++k)
      for (std::size_t c = 0; c < C; ++c)
        g[(n * segments + k) * C + c] = grad_out[n * C + c] * inv;
  return g;
}

}  // namespace tempo
