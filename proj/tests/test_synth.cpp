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


#include <gtest/gtest.h>

#include "tempo/synth.hpp"

namespace tempo {
namespace {

SynthOptions small(std::uint64_t seed) {
  SynthOptions o;
  o.num_videos = 20;
  o.frames = 12;
  o.height = 24;
  o.width = 28;
  o.seed = seed;
  return o;
}

TEST(Synth, DeterministicPerSeed) {
  const auto a = generate_synthetic(small(3)), b = generate_synthetic(small(3));
  const auto c = generate_synthetic(small(4));
  ASSERT_EQ(a.size(), 20u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].video.pixels, b[i].video.pixels);
    EXPECT_EQ(a[i].labels, b[i].labels);
    differs |= a[i].video.pixels != c[i].video.pixels;
  }
  EXPECT_TRUE(differs);
}

TEST(Synth, PairsAreTimeReversals) {
  const auto vids = generate_synthetic(small(5));
  for (std::size_t p = 0; p < vids.size(); p += 2) {
    const Video& f = vids[p].video;
    const Video& r = vids[p + 1].video;
    ASSERT_EQ(f.frames, 12u);
    for (std::size_t t = 0; t < f.frames; ++t)
      for (std::size_t y = 0; y < f.height; ++y)
        for (std::size_t x = 0; x < f.width; ++x)
          ASSERT_EQ(f.at(t, y, x, 0), r.at(f.frames - 1 - t, y, x, 0));
  }
}

TEST(Synth, TwoLabelsMirroredUnderReversal) {
  const auto vids = generate_synthetic(small(6));
  auto flip = [](std::size_t c) -> std::size_t {
    switch (c) {
      case kRight: return kLeft;
      case kLeft: return kRight;
      case kDown: return kUp;
      case kUp: return kDown;
      case kGrows: return kShrinks;
      default: return kGrows;
    }
  };
  for (std::size_t p = 0; p < vids.size(); p += 2) {
    const auto& a = vids[p].labels;
    const auto& b = vids[p + 1].labels;
    ASSERT_EQ(a.size(), 2u);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_LT(a[0], kGrows);
    EXPECT_GE(a[1], kGrows);
    EXPECT_EQ(b[0], flip(a[0]));
    EXPECT_EQ(b[1], flip(a[1]));
  }
}

TEST(Synth, SquareIsVisibleAgainstBackground) {
  for (const auto& sv : generate_synthetic(small(7))) {
    int hi = 0;
    for (auto p : sv.video.pixels) hi = std::max<int>(hi, p);
    EXPECT_GT(hi, 180);
  }
}

TEST(Synth, RejectsBadOptions) {
  SynthOptions o = small(0);
  o.num_videos = 3;
  EXPECT_THROW(generate_synthetic(o), ValidationError);
  o = small(0);
  o.frames = 1;
  EXPECT_THROW(generate_synthetic(o), ValidationError);
  o = small(0);
  o.height = 8;
  EXPECT_THROW(generate_synthetic(o), ValidationError);
}

TEST(Synth, WritesManifestAndVideos) {
  const fs::path dir = fs::temp_directory_path() / "tempo_synth_write";
  fs::remove_all(dir);
  const Manifest m = write_synthetic(dir, "train", small(8));
  ASSERT_EQ(m.size(), 20u);
  EXPECT_EQ(m[3].path, "train/vid_00003.xvid");
  const Manifest back = read_manifest(dir / "train.txt", kSynthClasses);
  EXPECT_EQ(format_manifest(back), format_manifest(m));
  const Video v = read_video(dir / m[3].path);
  EXPECT_EQ(v.pixels, generate_synthetic(small(8))[3].video.pixels);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace tempo
