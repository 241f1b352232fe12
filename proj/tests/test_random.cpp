/*
 * Copyright 2026 The faultlab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>
#include <string>

#include "faultlab/random.hpp"

namespace faultlab {
namespace {

std::string hex(std::span<const unsigned char> b) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (unsigned char c : b) {
    s += digits[c >> 4];
    s += digits[c & 15];
  }
  return s;
}

// Key = BLAKE2b-256("faultlab/rng/v1" || seed_le64 || (len_le64 || label)*),
// stream = ChaCha20 keystream under a zero nonce. Reference bytes were
// computed with an unrelated BLAKE2b/ChaCha20 implementation.
TEST(DeriveRng, KnownAnswers) {
  std::array<unsigned char, 32> out{};
  derive_rng(1, {"keygen"}).fill(out);
  EXPECT_EQ(hex(out), "9935698675d08da7e52966f13b1726689ac51775fb799fc8158dc0cd43c21bf2");
  derive_rng(42, {}).fill(out);
  EXPECT_EQ(hex(out), "a91ab800bcef3c46b991e02517888a92e6e3ce25ac2c15e5ef2a986d4722df0f");
  derive_rng(7, {"a", "b"}).fill(out);
  EXPECT_EQ(hex(out), "cf385d07de153934b98bc092be5cabbc7484ce43e98c60f74eb0e5d551108365");
  EXPECT_EQ(derive_rng(42, {}).next_u64(), 0x463cefbc00b81aa9ULL);
}

TEST(DeriveRng, StreamAcrossBufferBoundary) {
  Rng rng = derive_rng(3, {"test"});
  std::array<unsigned char, 4092> skip{};
  rng.fill(skip);
  std::array<unsigned char, 16> out{};
  rng.fill(out);
  EXPECT_EQ(hex(out), "3c8654201a6cd8c94a546fca5b2682d8");

  Rng words = derive_rng(3, {"test"});
  for (int i = 0; i < 511; ++i) words.next_u64();
  std::array<unsigned char, 4> pad{};
  words.fill(pad);
  EXPECT_EQ(words.next_u64(), 0xc9d86c1a2054863cULL);
}

TEST(DeriveRng, SameLabelsSameStream) {
  std::array<unsigned char, 32> a{}, b{};
  derive_rng(9, {"x", "y"}).fill(a);
  derive_rng(9, {"x", "y"}).fill(b);
  EXPECT_EQ(a, b);
}

TEST(DeriveRng, LabelFramingIsUnambiguous) {
  std::array<unsigned char, 32> a{}, b{};
  derive_rng(9, {"ab", "c"}).fill(a);
  derive_rng(9, {"a", "bc"}).fill(b);
  EXPECT_NE(a, b);
}

TEST(DeriveRng, DistinctLabelsGiveDistinctStreams) {
  std::set<std::array<unsigned char, 32>> seen;
  for (int i = 0; i < 10000; ++i) {
    std::array<unsigned char, 32> out{};
    derive_rng(5, {"trial", std::to_string(i)}).fill(out);
    EXPECT_TRUE(seen.insert(out).second) << i;
  }
}

TEST(Rng, UniformBelowRange) {
  Rng rng = derive_rng(1, {"uniform"});
  std::array<int, 7> hist{};
  for (int i = 0; i < 70000; ++i) ++hist[rng.uniform_below(u64{7})];
  for (int c : hist) EXPECT_NEAR(c, 10000, 500);
  const BigInt big = (BigInt(1) << 130) + 12345;
  for (int i = 0; i < 100; ++i) {
    const BigInt x = rng.uniform_below(big);
    EXPECT_GE(x, 0);
    EXPECT_LT(x, big);
  }
  EXPECT_THROW(rng.uniform_below(u64{0}), ArgumentError);
}

TEST(Sampling, TernaryIsUniform) {
  Rng rng = derive_rng(2, {"t"});
  const auto v = sample_ternary(rng, 30000);
  std::array<int, 3> hist{};
  for (i64 x : v) {
    ASSERT_GE(x, -1);
    ASSERT_LE(x, 1);
    ++hist[x + 1];
  }
  for (int c : hist) EXPECT_NEAR(c, 10000, 500);
}

TEST(Sampling, SparseTernaryHasExactWeight) {
  for (std::size_t h : {0u, 1u, 4u, 16u}) {
    Rng rng = derive_rng(h, {"sparse"});
    const auto v = sample_sparse_ternary(rng, 16, h);
    std::size_t nz = 0;
    for (i64 x : v) {
      if (x != 0) {
        ++nz;
        EXPECT_EQ(std::abs(x), 1);
      }
    }
    EXPECT_EQ(nz, h);
  }
  Rng rng = derive_rng(0, {});
  EXPECT_THROW(sample_sparse_ternary(rng, 4, 5), ArgumentError);
}

TEST(Sampling, GaussianMomentsAndTail) {
  Rng rng = derive_rng(3, {"g"});
  const auto v = sample_gaussian(rng, 100000, 3.2);
  double sum = 0, sq = 0;
  for (i64 x : v) {
    EXPECT_LE(std::abs(x), 19);  // round(6 sigma) = 19
    sum += static_cast<double>(x);
    sq += static_cast<double>(x * x);
  }
  const double mean = sum / 100000, var = sq / 100000 - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.05);
  // Rounding adds 1/12 to the variance.
  EXPECT_NEAR(var, 3.2 * 3.2 + 1.0 / 12.0, 0.2);
}

}  // namespace
}  // namespace faultlab
