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

#include <random>

#include "tempo/tensor.hpp"

namespace tempo {
namespace {

TEST(Tensor, ZeroFilledByDefault) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.rank(), 2u);
  for (double v : t.values()) EXPECT_EQ(v, 0.0);
}

TEST(Tensor, RejectsBadRank) {
  EXPECT_THROW(Tensor(Shape{}), ValidationError);
  EXPECT_THROW(Tensor(Shape{1, 1, 1, 1, 1, 1}), ValidationError);
}

TEST(Tensor, RejectsMismatchedData) {
  EXPECT_THROW(Tensor({2, 2}, {1.0, 2.0, 3.0}), ValidationError);
}

TEST(Tensor, ReshapeKeepsDataAndChecksCount) {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor r = t.reshaped({3, 2});
  EXPECT_EQ(r.dims(), (Shape{3, 2}));
  EXPECT_EQ(r.values(), t.values());
  EXPECT_THROW(t.reshaped({4}), ValidationError);
}

TEST(Tensor, ArithmeticInPlace) {
  Tensor a({3}, {1, 2, 3});
  a += Tensor({3}, {1, 1, 1});
  a *= 2.0;
  EXPECT_EQ(a.values(), (std::vector<double>{4, 6, 8}));
  EXPECT_THROW(a += Tensor({2}), ValidationError);
}

TEST(Tensor, MaxAbsDiff) {
  EXPECT_EQ(max_abs_diff(Tensor({2}, {1, 5}), Tensor({2}, {2, 3})), 2.0);
}

TEST(Tensor, ShapeString) { EXPECT_EQ(shape_str({2, 3, 4}), "[2,3,4]"); }

TEST(Seeds, MixingIsDeterministicAndSpreads) {
  EXPECT_EQ(mix_seed(7), mix_seed(7));
  EXPECT_NE(mix_seed(7), mix_seed(8));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 1));
}

TEST(Seeds, Uniform01InRange) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace tempo
