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

#include <random>

#include "faultlab/rns.hpp"
#include "oracles/oracles.hpp"

namespace faultlab {
namespace {

BigInt random_below(std::mt19937_64& gen, const BigInt& q) {
  BigInt x = 0;
  for (int w = 0; w < (bit_length(q) + 63) / 64 + 1; ++w) x = (x << 64) + gen();
  return x % q;
}

LimbChain small_chain() { return LimbChain({PrimeModulus(17), PrimeModulus(13)}); }

TEST(LimbChain, Constants) {
  const LimbChain c = small_chain();
  EXPECT_EQ(c.product(), BigInt(221));
  EXPECT_EQ(c.q_hat(0), BigInt(13));
  EXPECT_EQ(c.q_hat(1), BigInt(17));
  for (std::size_t k = 0; k < 2; ++k) {
    const u64 qk = c.modulus(k).value();
    EXPECT_EQ(mod_mul(static_cast<u64>(c.q_hat(k) % qk), c.q_hat_inv(k), qk), 1u);
  }
}

TEST(BuildChain, TwentyBitThreeLimbs) {
  const LimbChain c = build_chain(20, 3, 8);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.modulus(0).value(), 1048433u);
  EXPECT_EQ(c.modulus(1).value(), 1048273u);
  EXPECT_EQ(c.modulus(2).value(), 1048193u);
  std::set<u64> seen;
  for (const auto& m : c.moduli()) {
    EXPECT_TRUE(oracle::probable_prime(m.value()));
    EXPECT_EQ(m.value() % 16, 1u);
    EXPECT_EQ(bit_length(m.value()), 20);
    EXPECT_TRUE(seen.insert(m.value()).second);
  }
  EXPECT_EQ(build_chain(20, 3, 8), c);
}

TEST(BuildChain, SingleLimbAndErrors) {
  const LimbChain c = build_chain(60, 1, 16);
  EXPECT_EQ(c.product(), BigInt(c.modulus(0).value()));
  EXPECT_THROW(build_chain(60, 0, 16), ParameterError);
  EXPECT_THROW(build_chain(5, 2, 4), ParameterError);
}

TEST(Decompose, ZeroAndSmallValues) {
  const LimbChain c = build_chain(30, 3, 4);
  BigPoly p(4, c.composite());
  for (const auto& limb : decompose(p, c).limbs) {
    for (u64 x : limb.coeffs) EXPECT_EQ(x, 0u);
  }
  p.coeffs[2] = 777;
  for (const auto& limb : decompose(p, c).limbs) EXPECT_EQ(limb.coeffs[2], 777u);
  EXPECT_THROW(decompose(BigPoly(4, CompositeModulus(BigInt(221))), c), ArgumentError);
}

TEST(Crt, ExhaustiveOverTwoTwentyOne) {
  const LimbChain c = small_chain();
  const auto table = oracle::crt_table(17, 13);
  for (u64 r0 = 0; r0 < 17; ++r0) {
    for (u64 r1 = 0; r1 < 13; ++r1) {
      RnsPoly r;
      r.limbs.emplace_back(std::vector<u64>{r0, 0, 0, 0}, PrimeModulus(17));
      r.limbs.emplace_back(std::vector<u64>{r1, 0, 0, 0}, PrimeModulus(13));
      const BigPoly b = crt_reconstruct(r, c);
      EXPECT_EQ(b.coeffs[0], BigInt(table.at({r0, r1})));
      EXPECT_EQ(decompose(b, c), r);
    }
  }
}

TEST(Crt, RandomRoundTripThreeSixtyBitLimbs) {
  std::mt19937_64 gen(31);
  const LimbChain c = build_chain(60, 3, 1024);
  for (int t = 0; t < 1; ++t) {
    BigPoly p(1024, c.composite());
    for (auto& x : p.coeffs) x = random_below(gen, c.product());
    EXPECT_EQ(crt_reconstruct(decompose(p, c), c), p);
  }
  const LimbChain c20 = build_chain(20, 3, 8);
  for (int t = 0; t < 50; ++t) {
    BigPoly p(8, c20.composite());
    for (auto& x : p.coeffs) x = random_below(gen, c20.product());
    EXPECT_EQ(crt_reconstruct(decompose(p, c20), c20), p);
  }
}

TEST(Crt, ReconstructErrors) {
  const LimbChain c = small_chain();
  RnsPoly one;
  one.limbs.emplace_back(4, PrimeModulus(17));
  EXPECT_THROW(crt_reconstruct(one, c), ArgumentError);
  RnsPoly swapped;
  swapped.limbs.emplace_back(4, PrimeModulus(13));
  swapped.limbs.emplace_back(4, PrimeModulus(17));
  EXPECT_THROW(crt_reconstruct(swapped, c), ArgumentError);
}

TEST(Crt, MultiplicationHomomorphism) {
  std::mt19937_64 gen(17);
  const LimbChain c = build_chain(40, 3, 16);
  for (int t = 0; t < 5; ++t) {
    BigPoly a(16, c.composite()), b(16, c.composite());
    for (auto& x : a.coeffs) x = random_below(gen, c.product());
    for (auto& x : b.coeffs) x = random_below(gen, c.product());
    const RnsPoly prod = decompose(negacyclic_mul_schoolbook(a, b), c);
    const RnsPoly ra = decompose(a, c), rb = decompose(b, c);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_EQ(prod.limbs[k], negacyclic_mul_schoolbook(ra.limbs[k], rb.limbs[k]));
    }
  }
}

TEST(PredictRnsError, BruteForceTwoTwentyOne) {
  const LimbChain c = small_chain();
  // The value congruent to 1 mod 17 and 0 mod 13, found by scanning.
  const auto table = oracle::crt_table(17, 13);
  EXPECT_EQ(table.at({1, 0}), 52u);
  EXPECT_EQ(predict_rns_error(1, 0, c), BigInt(52));
  EXPECT_EQ(table.at({0, 1}), 170u);
  EXPECT_EQ(predict_rns_error(1, 1, c), BigInt(-51));
  EXPECT_EQ(predict_rns_error(0, 0, c), BigInt(0));
}

TEST(PredictRnsError, SingleLimbIsIdentity) {
  const LimbChain c = build_chain(60, 1, 16);
  EXPECT_EQ(predict_rns_error(1, 0, c), BigInt(1));
  EXPECT_EQ(predict_rns_error(-5, 0, c), BigInt(-5));
}

TEST(PredictRnsError, MatchesMeasuredFlipDelta) {
  std::mt19937_64 gen(5);
  const LimbChain c = build_chain(60, 3, 16);
  BigPoly p(16, c.composite());
  for (auto& x : p.coeffs) x = random_below(gen, c.product());
  const RnsPoly r = decompose(p, c);
  for (std::size_t k = 0; k < 3; ++k) {
    const u64 qk = c.modulus(k).value();
    for (std::size_t i = 0; i < 16; ++i) {
      for (int j = 0; j < 64; j += 4) {
        RnsPoly f = r;
        const u64 before = f.limbs[k].coeffs[i];
        const u64 after = (before ^ (u64{1} << j)) % qk;
        f.limbs[k].coeffs[i] = after;
        const BigInt delta = crt_reconstruct_coeff(f, i, c) - p.coeffs[i];
        const BigInt e = BigInt(after) - BigInt(before);
        const BigInt diff = (delta - predict_rns_error(e, k, c)) % c.product();
        EXPECT_EQ(diff, 0) << k << " " << i << " " << j;
        EXPECT_LE(2 * boost::multiprecision::abs(predict_rns_error(e, k, c)), c.product());
      }
    }
  }
}

TEST(PredictRnsError, CanBeAsLargeAsQk) {
  const LimbChain c = build_chain(60, 3, 16);
  const int threshold = bit_length(c.product()) - c.modulus(0).bit_width() - 1;
  bool exceeded = false;
  for (int j = 0; j < 60 && !exceeded; ++j) {
    exceeded = bit_length(BigInt(boost::multiprecision::abs(predict_rns_error(BigInt(1) << j, 0, c)))) > threshold;
  }
  EXPECT_TRUE(exceeded);
}

}  // namespace
}  // namespace faultlab
