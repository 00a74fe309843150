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

// Synthetic temporal dataset: a bright square on a dark, lightly noisy
// background that moves along one axis while growing or shrinking.
//
// Classes: 0 right, 1 left, 2 down, 3 up, 4 grows, 5 shrinks. Every video
// has exactly one motion and one size label. Videos come in pairs where the
// second is the exact frame reversal of the first, so the pair carries
// opposite labels on both axes but identical frame sets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

#include "tempo/io.hpp"
#include "tempo/sampling.hpp"

namespace tempo {

inline constexpr std::size_t kSynthClasses = 6;

enum SynthClass : std::size_t { kRight = 0, kLeft, kDown, kUp, kGrows, kShrinks };

struct SynthOptions {
  std::size_t num_videos = 100;
  std::size_t frames = 16;
  std::size_t height = 32;
  std::size_t width = 32;
  std::uint64_t seed = 0;
};

namespace detail {

inline double overlap(double lo, double hi, double p) {
  return std::max(0.0, std::min(hi, p + 1.0) - std::max(lo, p));
}

struct SquareTrack {
  bool horizontal;
  int direction;  // +1: increasing coordinate
  bool grows;
  double start_along, across;
  double speed;
  double size_from, size_to;
};

inline Video render_track(const SquareTrack& tr, const SynthOptions& opt, std::mt19937_64& rng) {
  Video v{opt.frames, opt.height, opt.width, 1, {}};
  v.pixels.resize(opt.frames * opt.height * opt.width);
  const double bg = 24.0, fg = 224.0;
  for (std::size_t t = 0; t < opt.frames; ++t) {
    const double u = opt.frames > 1 ? static_cast<double>(t) / static_cast<double>(opt.frames - 1) : 0.0;
    const double along = tr.start_along + tr.direction * tr.speed * static_cast<double>(t);
    const double size = tr.size_from + (tr.size_to - tr.size_from) * u;
    const double cx = tr.horizontal ? along : tr.across;
    const double cy = tr.horizontal ? tr.across : along;
    for (std::size_t y = 0; y < opt.height; ++y) {
      const double oy = overlap(cy - size / 2, cy + size / 2, static_cast<double>(y));
      for (std::size_t x = 0; x < opt.width; ++x) {
        const double ox = overlap(cx - size / 2, cx + size / 2, static_cast<double>(x));
        const double noise = (uniform01(rng) - 0.5) * 16.0;
        const double val = bg + (fg - bg) * ox * oy + noise;
        v.pixels[(t * opt.height + y) * opt.width + x] =
            static_cast<std::uint8_t>(std::clamp(std::lround(val), 0L, 255L));
      }
    }
  }
  return v;
}

inline Video reversed(const Video& v) {
  Video r = v;
  const std::size_t frame = v.height * v.width * v.channels;
  for (std::size_t t = 0; t < v.frames; ++t)
    std::copy_n(v.pixels.begin() + static_cast<std::ptrdiff_t>((v.frames - 1 - t) * frame), frame,
                r.pixels.begin() + static_cast<std::ptrdiff_t>(t * frame));
  return r;
}

inline std::size_t motion_class(bool horizontal, int direction) {
  if (horizontal) return direction > 0 ? kRight : kLeft;
  return direction > 0 ? kDown : kUp;
}

}  // namespace detail

struct SynthVideo {
  Video video;
  std::vector<std::size_t> labels;  // ascending
};

/// Generates num_videos (must be even) videos as reversal pairs (2i, 2i+1).
inline std::vector<SynthVideo> generate_synthetic(const SynthOptions& opt) {
  require(opt.num_videos % 2 == 0, "gen-synth: num_videos must be even (videos come in reversal pairs)");
  require(opt.frames >= 2, "gen-synth: need at least 2 frames");
  require(opt.height >= 16 && opt.width >= 16, "gen-synth: frames must be at least 16x16");
  std::mt19937_64 rng(mix_seed(opt.seed, 0x57e7));
  std::vector<SynthVideo> out;
  out.reserve(opt.num_videos);
  const double travel_max = static_cast<double>(std::min(opt.height, opt.width)) / 2.0;
  for (std::size_t p = 0; p < opt.num_videos / 2; ++p) {
    detail::SquareTrack tr{};
    tr.horizontal = uniform01(rng) < 0.5;
    tr.direction = uniform01(rng) < 0.5 ? 1 : -1;
    tr.grows = uniform01(rng) < 0.5;
    const double small = 4.0 + 2.0 * uniform01(rng);
    const double large = 9.0 + 3.0 * uniform01(rng);
    tr.size_from = tr.grows ? small : large;
    tr.size_to = tr.grows ? large : small;
    tr.speed = std::min(0.8 + 0.4 * uniform01(rng),
                        travel_max / static_cast<double>(opt.frames - 1));
    const double extent_along = static_cast<double>(tr.horizontal ? opt.width : opt.height);
    const double extent_across = static_cast<double>(tr.horizontal ? opt.height : opt.width);
    const double half = large / 2.0 + 1.0;
    const double travel = tr.speed * static_cast<double>(opt.frames - 1);
    const double lo = half, hi = std::max(lo, extent_along - half - travel);
    const double first = lo + (hi - lo) * uniform01(rng);
    tr.start_along = tr.direction > 0 ? first : first + travel;
    tr.across = half + (extent_across - 2 * half) * uniform01(rng);
    Video fwd = detail::render_track(tr, opt, rng);
    Video back = detail::reversed(fwd);
    const std::size_t m = detail::motion_class(tr.horizontal, tr.direction);
    const std::size_t m_rev = detail::motion_class(tr.horizontal, -tr.direction);
    out.push_back({std::move(fwd), {m, tr.grows ? kGrows : kShrinks}});
    out.push_back({std::move(back), {m_rev, tr.grows ? kShrinks : kGrows}});
  }
  return out;
}

/// Writes <out_dir>/<split>/vid_NNNNN.xvid and <out_dir>/<split>.txt.
inline Manifest write_synthetic(const fs::path& out_dir, const std::string& split,
                                const SynthOptions& opt) {
  const auto videos = generate_synthetic(opt);
  Manifest m;
  char name[64];
  for (std::size_t i = 0; i < videos.size(); ++i) {
    std::snprintf(name, sizeof name, "vid_%05zu.xvid", i);
    const std::string rel = split + "/" + name;
    write_video(out_dir / rel, videos[i].video);
    m.push_back({rel, videos[i].video.frames, videos[i].labels});
  }
  write_manifest(out_dir / (split + ".txt"), m);
  return m;
}

}  // namespace tempo
