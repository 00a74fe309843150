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

// Frame-index and spatial-view planning, and materialization of a planned
// view into a [T,C,crop,crop] tensor.
//
// Two temporal patterns are supported:
//   segments(K)   one frame from each of K equal segments of the video
//   strided(T,s)  T frames taken every s frames from a start index; indices
//                 past the end are clamped to the last frame

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "tempo/tensor.hpp"

namespace tempo {

enum class SamplerPattern { segments, strided };

inline SamplerPattern parse_sampler_pattern(std::string_view s) {
  if (s == "segments") return SamplerPattern::segments;
  if (s == "strided") return SamplerPattern::strided;
  fail("unknown sampler '", s, "' (expected segments or strided)");
}

struct ClipSamplerSpec {
  SamplerPattern pattern = SamplerPattern::strided;
  std::size_t segments = 8;  ///< K
  std::size_t frames = 8;    ///< T
  std::size_t stride = 8;    ///< tau

  static ClipSamplerSpec make_segments(std::size_t k) {
    return {SamplerPattern::segments, k, k, 1};
  }
  static ClipSamplerSpec make_strided(std::size_t t, std::size_t tau) {
    return {SamplerPattern::strided, t, t, tau};
  }

  /// Frames emitted per view.
  std::size_t length() const { return pattern == SamplerPattern::segments ? segments : frames; }

  /// Temporal extent of a strided clip, (T - 1) * tau + 1.
  std::size_t span() const { return (frames - 1) * stride + 1; }

  void validate() const {
    if (pattern == SamplerPattern::segments)
      require(segments >= 1, "sampler: segment count K must be >= 1");
    else
      require(frames >= 1 && stride >= 1, "sampler: T and stride must be >= 1");
  }
};

struct FrameGeometry {
  std::size_t height = 0;
  std::size_t width = 0;
};

struct Crop {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t size = 0;

  friend bool operator==(const Crop&, const Crop&) = default;
};

/// One spatio-temporal view: frames, short-side scale, square crop in the
/// scaled frame, and horizontal flip.
struct View {
  std::vector<std::size_t> frame_indices;
  std::size_t scale = 0;
  Crop crop;
  bool flip = false;

  friend bool operator==(const View&, const View&) = default;
};

struct ClipPlan {
  std::vector<View> views;

  friend bool operator==(const ClipPlan&, const ClipPlan&) = default;
};

enum class SegmentMode { center, random };

/// Frame dimensions after resizing the short side to `scale`.
inline FrameGeometry scaled_geometry(const FrameGeometry& g, std::size_t scale) {
  require(g.height >= 1 && g.width >= 1, "frame geometry must be positive");
  require(scale >= 1, "scale must be positive");
  const std::size_t short_side = std::min(g.height, g.width);
  const auto resize = [&](std::size_t side) {
    if (side == short_side) return scale;
    return static_cast<std::size_t>(std::lround(static_cast<double>(side) *
                                                 static_cast<double>(scale) /
                                                 static_cast<double>(short_side)));
  };
  return {resize(g.height), resize(g.width)};
}

/// Segment g spans [floor(gF/K), floor((g+1)F/K)). Center mode picks
/// floor(gF/K) + floor(F/2K) clamped into the segment; random mode draws
/// uniformly inside it. With F < K segments degenerate and each index is the
/// frame nearest to gF/K.
inline std::vector<std::size_t> segment_indices(std::size_t F, long K, SegmentMode mode,
                                                std::uint64_t seed = 0) {
  require(K > 0, "segment_indices: K must be positive, got ", K);
  require(F >= 1, "segment_indices: video has no frames");
  const auto k = static_cast<std::size_t>(K);
  std::vector<std::size_t> out(k);
  if (F < k) {
    for (std::size_t g = 0; g < k; ++g) out[g] = std::min((g * F + k / 2) / k, F - 1);
    return out;
  }
  std::mt19937_64 rng(mix_seed(seed, 0x5e9));
  for (std::size_t g = 0; g < k; ++g) {
    const std::size_t begin = g * F / k, end = (g + 1) * F / k;
    const std::size_t len = end - begin;
    if (mode == SegmentMode::center) {
      out[g] = std::min(begin + F / (2 * k), end - 1);
    } else {
      out[g] = begin + std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(len)),
                                len - 1);
    }
  }
  return out;
}

/// start + i*tau for i in [0,T), each clamped to F-1.
inline std::vector<std::size_t> strided_clip_indices(std::size_t F, std::size_t start,
                                                     std::size_t T, std::size_t tau) {
  require(F >= 1 && start < F, "strided_clip_indices: start ", start, " outside video of ", F,
          " frames");
  std::vector<std::size_t> out(T);
  for (std::size_t i = 0; i < T; ++i) out[i] = std::min(start + i * tau, F - 1);
  return out;
}

struct AugmentSettings {
  std::size_t scale_lo = 128;
  std::size_t scale_hi = 160;
  std::size_t crop = 112;
  bool flip = true;
};

/// Short side in [128,160], 112 crop, random flip.
inline AugmentSettings clip_model_augment() { return {128, 160, 112, true}; }

/// Short side 256, 224 crop, random flip.
inline AugmentSettings segment_model_augment() { return {256, 256, 224, true}; }

/// Seeded training view: random temporal placement, random scale, random
/// crop position and (if enabled) a fair-coin flip.
inline View train_augment_view(std::size_t F, const FrameGeometry& geom,
                               const ClipSamplerSpec& spec, const AugmentSettings& aug,
                               std::uint64_t seed) {
  spec.validate();
  require(F >= 1, "train_augment_view: video has no frames");
  require(aug.scale_lo <= aug.scale_hi, "train_augment_view: scale range [", aug.scale_lo, ",",
          aug.scale_hi, "] is empty");
  require(aug.crop >= 1 && aug.crop <= aug.scale_lo, "train_augment_view: crop ", aug.crop,
          " larger than scaled short side ", aug.scale_lo);
  std::mt19937_64 rng(mix_seed(seed, 0xa06));
  const auto draw = [&rng](std::size_t lo, std::size_t hi) {
    return lo + std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1)),
                         hi - lo);
  };
  View v;
  if (spec.pattern == SamplerPattern::segments) {
    v.frame_indices = segment_indices(F, static_cast<long>(spec.segments), SegmentMode::random,
                                      rng());
  } else {
    const std::size_t span = spec.span();
    const std::size_t last_start = F > span ? F - span : 0;
    v.frame_indices = strided_clip_indices(F, draw(0, last_start), spec.frames, spec.stride);
  }
  v.scale = draw(aug.scale_lo, aug.scale_hi);
  const FrameGeometry sg = scaled_geometry(geom, v.scale);
  require(aug.crop <= std::min(sg.height, sg.width), "train_augment_view: crop ", aug.crop,
          " larger than scaled frame ", sg.height, "x", sg.width);
  v.crop.size = aug.crop;
  v.crop.x = draw(0, sg.width - aug.crop);
  v.crop.y = draw(0, sg.height - aug.crop);
  v.flip = aug.flip && uniform01(rng) < 0.5;
  return v;
}

struct DenseSettings {
  std::size_t num_clips = 10;
  std::size_t crops_per_clip = 3;
  std::vector<std::size_t> scales{128, 144, 160};
  std::size_t crop = 128;
  bool flip = false;
};

/// 10 clips x 3 crops x scales {128,144,160}: 90 views per video.
inline DenseSettings clip_model_dense() { return {}; }

/// 5 clips x 3 crops of 256.
inline DenseSettings segment_model_dense() { return {5, 3, {256}, 256, false}; }

namespace detail {

inline std::size_t spread(std::size_t i, std::size_t n, std::size_t extent) {
  if (n <= 1) return extent / 2;
  return i * extent / (n - 1);
}

}  // namespace detail

/// Deterministic test plan. Clip i of n starts at floor(i * (F - span) / (n - 1))
/// (a single clip is centered); crops are spread evenly along the longer
/// spatial axis (left/center/right for three) and centered on the other.
/// Views are ordered clip-major, then scale, then crop, then flip.
inline ClipPlan dense_test_plan(std::size_t F, const FrameGeometry& geom,
                                const ClipSamplerSpec& spec, const DenseSettings& ds) {
  spec.validate();
  require(F >= 1, "dense_test_plan: video has no frames");
  require(ds.num_clips >= 1 && ds.crops_per_clip >= 1, "dense_test_plan: need at least one clip and crop");
  require(!ds.scales.empty(), "dense_test_plan: no scales");
  ClipPlan plan;
  for (std::size_t i = 0; i < ds.num_clips; ++i) {
    std::vector<std::size_t> frames;
    if (spec.pattern == SamplerPattern::strided) {
      const std::size_t span = spec.span();
      const std::size_t room = F > span ? F - span : 0;
      frames = strided_clip_indices(F, detail::spread(i, ds.num_clips, room), spec.frames,
                                    spec.stride);
    } else {
      const std::size_t K = spec.segments;
      frames.resize(K);
      if (F < K) {
        frames = segment_indices(F, static_cast<long>(K), SegmentMode::center);
      } else {
        for (std::size_t g = 0; g < K; ++g) {
          const std::size_t begin = g * F / K, len = (g + 1) * F / K - begin;
          frames[g] = begin + std::min((2 * i + 1) * len / (2 * ds.num_clips), len - 1);
        }
      }
    }
    for (std::size_t scale : ds.scales) {
      const FrameGeometry sg = scaled_geometry(geom, scale);
      require(ds.crop <= std::min(sg.height, sg.width), "dense_test_plan: crop ", ds.crop,
              " larger than scaled frame ", sg.height, "x", sg.width);
      const bool wide = sg.width >= sg.height;
      const std::size_t long_room = (wide ? sg.width : sg.height) - ds.crop;
      const std::size_t short_off = ((wide ? sg.height : sg.width) - ds.crop) / 2;
      for (std::size_t c = 0; c < ds.crops_per_clip; ++c) {
        const std::size_t along = detail::spread(c, ds.crops_per_clip, long_room);
        Crop crop{wide ? along : short_off, wide ? short_off : along, ds.crop};
        for (int f = 0; f < (ds.flip ? 2 : 1); ++f)
          plan.views.push_back(View{frames, scale, crop, f == 1});
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// materialization
// ---------------------------------------------------------------------------

/// Decoded video, u8 pixels laid out [T][H][W][C].
struct Video {
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<std::uint8_t> pixels;

  FrameGeometry geometry() const { return {height, width}; }
  std::uint8_t at(std::size_t t, std::size_t y, std::size_t x, std::size_t c) const {
    return pixels[((t * height + y) * width + x) * channels + c];
  }
};

enum class Resample { bilinear, nearest };

/// Cuts the view out of the video as [T, C, crop, crop] with values in
/// [0,1]. Scaling maps pixel centers (half-pixel convention) and clamps at
/// the border; at the native scale this is an exact copy.
inline Tensor materialize_view(const Video& video, const View& view,
                               Resample mode = Resample::bilinear) {
  require(video.pixels.size() == video.frames * video.height * video.width * video.channels,
          "video pixel buffer does not match its header");
  const FrameGeometry sg = scaled_geometry(video.geometry(), view.scale);
  const std::size_t S = view.crop.size;
  require(view.crop.x + S <= sg.width && view.crop.y + S <= sg.height,
          "view crop exceeds scaled frame");
  const std::size_t T = view.frame_indices.size(), C = video.channels;
  Tensor out({T, C, S, S});
  const double ry = static_cast<double>(video.height) / static_cast<double>(sg.height);
  const double rx = static_cast<double>(video.width) / static_cast<double>(sg.width);

  struct Tap {
    std::size_t i0, i1;
    double a;
  };
  const auto taps = [mode](std::size_t pos, double ratio, std::size_t extent) {
    double src = (static_cast<double>(pos) + 0.5) * ratio - 0.5;
    if (mode == Resample::nearest) {
      const auto i = static_cast<std::size_t>(
          std::clamp(std::floor(src + 0.5), 0.0, static_cast<double>(extent - 1)));
      return Tap{i, i, 0.0};
    }
    src = std::clamp(src, 0.0, static_cast<double>(extent - 1));
    const auto i0 = static_cast<std::size_t>(std::floor(src));
    const std::size_t i1 = std::min(i0 + 1, extent - 1);
    return Tap{i0, i1, src - static_cast<double>(i0)};
  };
  std::vector<Tap> ytap(S), xtap(S);
  for (std::size_t i = 0; i < S; ++i) {
    ytap[i] = taps(view.crop.y + i, ry, video.height);
    const std::size_t ox = view.flip ? S - 1 - i : i;
    xtap[i] = taps(view.crop.x + ox, rx, video.width);
  }
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t f = view.frame_indices[t];
    require(f < video.frames, "view frame index ", f, " outside video of ", video.frames);
    for (std::size_t c = 0; c < C; ++c) {
      double* dst = out.data() + (t * C + c) * S * S;
      for (std::size_t y = 0; y < S; ++y) {
        const Tap& ty = ytap[y];
        for (std::size_t x = 0; x < S; ++x) {
          const Tap& tx = xtap[x];
          const double p00 = video.at(f, ty.i0, tx.i0, c), p01 = video.at(f, ty.i0, tx.i1, c);
          const double p10 = video.at(f, ty.i1, tx.i0, c), p11 = video.at(f, ty.i1, tx.i1, c);
          double v;
          if (ty.a == 0.0 && tx.a == 0.0) {
            v = p00;
          } else {
            const double top = p00 + tx.a * (p01 - p00);
            const double bot = p10 + tx.a * (p11 - p10);
            v = top + ty.a * (bot - top);
          }
          dst[y * S + x] = v / 255.0;
        }
      }
    }
  }
  return out;
}

}  // namespace tempo
