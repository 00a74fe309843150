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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "tempo/gradcheck.hpp"
#include "tempo/temporal.hpp"
#include "test_util.hpp"

namespace tempo {
namespace {

using testing::random_tensor;

// x[t] for a single 1x1 channel, offsets and weights for one group.
std::vector<double> interlace1(const std::vector<double>& x, double offset,
                               const std::vector<double>& w) {
  const std::size_t T = x.size();
  const Tensor in({1, T, 1, 1, 1}, x);
  InterlaceParams p{Tensor({1, 1}, {offset}), Tensor({1, 1, T}, w)};
  return interlace_forward(in, GroupSpec::even(1, 1), p, static_cast<double>(T)).values();
}

// Shifts every channel of a group by an integer number of frames with zero
// fill: y[t] = x[t + s].
Tensor integer_shift(const Tensor& x, const GroupSpec& groups, const std::vector<long>& shifts) {
  const std::size_t N = x.dim(0), T = x.dim(1), C = x.dim(2), hw = x.dim(3) * x.dim(4);
  Tensor y(x.dims());
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t g = 0; g < groups.num_groups(); ++g)
      for (std::size_t t = 0; t < T; ++t) {
        const long src = static_cast<long>(t) + shifts[n * groups.num_groups() + g];
        if (src < 0 || src >= static_cast<long>(T)) continue;
        for (std::size_t c = groups[g].begin; c < groups[g].end; ++c)
          for (std::size_t i = 0; i < hw; ++i)
            y[((n * T + t) * C + c) * hw + i] =
                x[((n * T + static_cast<std::size_t>(src)) * C + c) * hw + i];
      }
  return y;
}

InterlaceParams unit_params(std::size_t N, std::size_t G, std::size_t T) {
  InterlaceParams p{Tensor({N, G}), Tensor({N, G, T})};
  p.weights.fill(1.0);
  return p;
}

TEST(Interlace, HandExamples) {
  EXPECT_EQ(interlace1({1, 2, 3}, 0.0, {1, 1, 1}), (std::vector<double>{1, 2, 3}));
  EXPECT_EQ(interlace1({1, 2, 3}, 0.5, {1, 1, 1}), (std::vector<double>{1.5, 2.5, 1.5}));
  EXPECT_EQ(interlace1({1, 2, 3}, 1.0, {1, 1, 1}), (std::vector<double>{2, 3, 0}));
  EXPECT_EQ(interlace1({1, 2, 3}, 0.0, {2, 1, 1}), (std::vector<double>{2, 2, 3}));
}

TEST(Interlace, PositiveOffsetReadsTheFuture) {
  const auto y = interlace1({0, 0, 5, 0}, 2.0, {1, 1, 1, 1});
  EXPECT_EQ(y, (std::vector<double>{5, 0, 0, 0}));
  const auto z = interlace1({0, 0, 5, 0}, -1.0, {1, 1, 1, 1});
  EXPECT_EQ(z, (std::vector<double>{0, 0, 0, 5}));
}

TEST(Interlace, ZeroOffsetUnitWeightIsIdentity) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Tensor x = random_tensor({2, 5, 6, 2, 3}, s);
    const GroupSpec g = GroupSpec::even(6, 3);
    EXPECT_LE(max_abs_diff(interlace_forward(x, g, unit_params(2, 3, 5), 2.5), x), 1e-15);
  }
}

TEST(Interlace, IntegerOffsetsEqualIntegerShifts) {
  std::mt19937_64 rng(5);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t T = 2 + s % 7, G = 1 + s % 4, C = G + s % 3, N = 1 + s % 2;
    const double dmax = static_cast<double>(T) / 2.0;
    const GroupSpec groups = GroupSpec::even(C, G);
    const Tensor x = random_tensor({N, T, C, 2, 2}, 100 + s);
    InterlaceParams p = unit_params(N, G, T);
    std::vector<long> shifts;
    for (std::size_t i = 0; i < N * G; ++i) {
      const long lim = static_cast<long>(std::floor(dmax));
      const long k = static_cast<long>(rng() % static_cast<std::uint64_t>(2 * lim + 1)) - lim;
      shifts.push_back(k);
      p.offsets[i] = static_cast<double>(k);
    }
    EXPECT_LE(max_abs_diff(interlace_forward(x, groups, p, dmax), integer_shift(x, groups, shifts)),
              1e-15);
  }
}

TEST(Interlace, LinearInInput) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const GroupSpec g = GroupSpec::even(4, 2);
    InterlaceParams p{random_tensor({2, 2}, s, -2.0, 2.0), random_tensor({2, 2, 5}, s + 1, 0, 2)};
    const Tensor x1 = random_tensor({2, 5, 4, 1, 2}, s + 2), x2 = random_tensor({2, 5, 4, 1, 2}, s + 3);
    Tensor mix = x1;
    mix *= 1.7;
    Tensor b = x2;
    b *= -0.4;
    mix += b;
    Tensor want = interlace_forward(x1, g, p, 2.5);
    want *= 1.7;
    Tensor rhs = interlace_forward(x2, g, p, 2.5);
    rhs *= -0.4;
    want += rhs;
    EXPECT_LE(max_abs_diff(interlace_forward(mix, g, p, 2.5), want), 1e-12);
  }
}

TEST(Interlace, OffsetGradientIsFrameDifference) {
  // one group, one channel: d/do sum_t dy[t] y[t] = sum_t dy[t] w[t] (x[t+k+1] - x[t+k])
  const std::vector<double> x{0.3, -1.2, 2.0, 0.7, -0.5};
  const std::vector<double> w{1.0, 0.5, 1.5, 2.0, 0.2};
  const std::vector<double> dy{0.4, -0.3, 1.1, 0.9, -2.0};
  const double o = 1.25;
  const Tensor in({1, 5, 1, 1, 1}, x);
  InterlaceParams p{Tensor({1, 1}, {o}), Tensor({1, 1, 5}, w)};
  const auto g = interlace_backward(in, GroupSpec::even(1, 1), p, 2.5, Tensor({1, 5, 1, 1, 1}, dy));
  const auto at = [&](long i) { return i >= 0 && i < 5 ? x[static_cast<std::size_t>(i)] : 0.0; };
  double want = 0.0;
  for (long t = 0; t < 5; ++t) want += dy[t] * w[t] * (at(t + 2) - at(t + 1));
  EXPECT_NEAR(g.offsets[0], want, 1e-15);
}

TEST(Interlace, RejectsBadParameters) {
  const Tensor x({1, 4, 2, 1, 1});
  const GroupSpec g = GroupSpec::even(2, 2);
  InterlaceParams p = unit_params(1, 2, 4);
  p.offsets[0] = 3.0;
  EXPECT_THROW(interlace_forward(x, g, p, 2.0), ValidationError);
  p.offsets[0] = 0.0;
  p.weights[1] = -0.1;
  EXPECT_THROW(interlace_forward(x, g, p, 2.0), ValidationError);
  EXPECT_THROW(interlace_forward(x, GroupSpec::even(2, 1), unit_params(1, 2, 4), 2.0),
               ValidationError);
}

TEST(GroupSpec, EvenSplitAndValidation) {
  const GroupSpec g = GroupSpec::even(10, 4);
  ASSERT_EQ(g.num_groups(), 4u);
  EXPECT_EQ(g[0].end - g[0].begin, 3u);
  EXPECT_EQ(g[3].end - g[3].begin, 2u);
  EXPECT_EQ(g.num_channels(), 10u);
  EXPECT_THROW(GroupSpec::even(2, 3), ValidationError);
  EXPECT_THROW(GroupSpec({{0, 2}, {3, 4}}), ValidationError);
}

TEST(Tsm, HandExample) {
  Tensor x({1, 3, 4, 1, 1});
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t c = 0; c < 4; ++c) x[t * 4 + c] = 10.0 * t + c;
  const Tensor y = tsm_shift(x, ShiftSpec{0.25});
  const auto channel = [&](std::size_t c) {
    return std::vector<double>{y[c], y[4 + c], y[8 + c]};
  };
  EXPECT_EQ(channel(0), (std::vector<double>{10, 20, 0}));
  EXPECT_EQ(channel(1), (std::vector<double>{0, 1, 11}));
  EXPECT_EQ(channel(2), (std::vector<double>{2, 12, 22}));
  EXPECT_EQ(channel(3), (std::vector<double>{3, 13, 23}));
}

TEST(Tsm, ZerosStayZero) {
  const Tensor x({2, 4, 8, 2, 2});
  EXPECT_EQ(tsm_shift(x, ShiftSpec{0.125}), x);
}

TEST(Tsm, EqualsInterlaceWithUnitShifts) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::size_t N = 1 + s % 2, T = 2 + s % 6, fold = 1 + s % 2, rest = s % 3;
    const std::size_t C = 2 * fold + rest;
    const Tensor x = random_tensor({N, T, C, 2, 1}, 300 + s);
    const ShiftSpec spec{static_cast<double>(fold) / static_cast<double>(C)};
    ASSERT_EQ(spec.fold_channels(C), fold);
    std::vector<GroupSpec::Range> r{{0, fold}, {fold, 2 * fold}};
    if (rest) r.push_back({2 * fold, C});
    const GroupSpec groups(r);
    InterlaceParams p = unit_params(N, groups.num_groups(), T);
    for (std::size_t n = 0; n < N; ++n) {
      p.offsets[n * groups.num_groups()] = 1.0;
      p.offsets[n * groups.num_groups() + 1] = -1.0;
    }
    const double dmax = static_cast<double>(T) / 2.0 < 1.0 ? 1.0 : static_cast<double>(T) / 2.0;
    EXPECT_LE(max_abs_diff(tsm_shift(x, spec), interlace_forward(x, groups, p, dmax)), 1e-15);
  }
}

TEST(Tsm, FoldValidation) {
  EXPECT_THROW(tsm_shift(Tensor({1, 2, 1, 1, 1}), ShiftSpec{0.125}), ValidationError);
  EXPECT_THROW(tsm_shift(Tensor({1, 2, 4, 1, 1}), ShiftSpec{0.0}), ValidationError);
  EXPECT_EQ(ShiftSpec{0.1}.fold_channels(10), 1u);
  EXPECT_EQ(ShiftSpec{0.125}.fold_channels(8), 1u);
  EXPECT_EQ(ShiftSpec{0.125}.fold_channels(12), 2u);
}

TEST(Consensus, Examples) {
  const Tensor x = random_tensor({3, 1, 4}, 9);
  EXPECT_EQ(segment_consensus(x).values(), x.values());
  EXPECT_EQ(segment_consensus(Tensor({1, 2, 2}, {0, 2, 2, 0})).values(),
            (std::vector<double>{1, 1}));
}

TEST(Consensus, PermutationInvariantExactly) {
  std::mt19937_64 rng(4);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::size_t K = 2 + s % 7, C = 3;
    const Tensor x = random_tensor({2, K, C}, 400 + s, -1e3, 1e3);
    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tensor y(x.dims());
    for (std::size_t n = 0; n < 2; ++n)
      for (std::size_t k = 0; k < K; ++k)
        for (std::size_t c = 0; c < C; ++c)
          y[(n * K + k) * C + c] = x[(n * K + perm[k]) * C + c];
    EXPECT_EQ(segment_consensus(x), segment_consensus(y));
  }
}

class TemporalGradients : public ::testing::TestWithParam<const char*> {};

TEST_P(TemporalGradients, MatchFiniteDifferences) {
  for (const auto& check : gradient_checks()) {
    if (check.name != GetParam()) continue;
    const auto r = run_gradcheck(check, {});
    EXPECT_TRUE(r.passed) << r.name << " max rel error " << r.max_rel_error;
    return;
  }
  FAIL() << "no check named " << GetParam();
}

INSTANTIATE_TEST_SUITE_P(Temporal, TemporalGradients,
                         ::testing::Values("interlace", "tsm_shift", "segment_consensus"));

}  // namespace
}  // namespace tempo
