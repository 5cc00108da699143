// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/fp16.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

namespace nf4 {
namespace {

// Value of a binary16 pattern computed directly from its fields.
double half_value(std::uint16_t h) {
  const int sign = (h >> 15) ? -1 : 1;
  const int exp = (h >> 10) & 0x1f;
  const int mant = h & 0x3ff;
  if (exp == 0) return sign * std::ldexp(mant, -24);
  if (exp == 31) return mant ? NAN : sign * INFINITY;
  return sign * std::ldexp(1024 + mant, exp - 25);
}

// Round-to-nearest-even by search over every non-negative finite half.
std::uint16_t nearest_half_oracle(float f) {
  const double a = std::fabs(static_cast<double>(f));
  const std::uint16_t sign = std::signbit(f) ? 0x8000 : 0;
  if (a >= 65520.0) return sign | 0x7c00;
  std::uint16_t lo = 0, hi = 0x7bff;
  while (lo < hi) {  // first half with value >= a
    const std::uint16_t mid = static_cast<std::uint16_t>((lo + hi) / 2);
    if (half_value(mid) < a) lo = mid + 1; else hi = mid;
  }
  std::uint16_t best = lo;
  if (lo > 0) {
    const double up = half_value(lo) - a;
    const double down = a - half_value(lo - 1);
    if (down < up || (down == up && ((lo - 1) & 1) == 0)) best = lo - 1;
  }
  return sign | best;
}

TEST(Fp16Test, WideningMatchesFieldDecodeForAllPatterns) {
  for (std::uint32_t h = 0; h < 0x10000; ++h) {
    const float f = half_to_float(Half{static_cast<std::uint16_t>(h)});
    const double expect = half_value(static_cast<std::uint16_t>(h));
    if (std::isnan(expect)) {
      EXPECT_TRUE(std::isnan(f)) << h;
    } else {
      EXPECT_EQ(static_cast<double>(f), expect) << h;
      EXPECT_EQ(std::signbit(f), (h & 0x8000) != 0) << h;
    }
  }
}

TEST(Fp16Test, NarrowingRoundTripsEveryHalf) {
  for (std::uint32_t h = 0; h < 0x10000; ++h) {
    const Half in{static_cast<std::uint16_t>(h)};
    const float f = half_to_float(in);
    if (std::isnan(f)) {
      EXPECT_TRUE(std::isnan(half_to_float(float_to_half(f))));
    } else {
      EXPECT_EQ(float_to_half(f).bits, h);
    }
  }
}

TEST(Fp16Test, NarrowingMatchesNearestEvenOracle) {
  std::mt19937 rng(1234);
  std::uniform_int_distribution<std::uint32_t> bits;
  for (int i = 0; i < 200000; ++i) {
    // Restrict the exponent to the range where halves live, plus some spill.
    std::uint32_t x = bits(rng);
    const std::uint32_t exp = 95 + (x % 50);
    x = (x & 0x807fffffu) | (exp << 23);
    const float f = std::bit_cast<float>(x);
    ASSERT_EQ(float_to_half(f).bits, nearest_half_oracle(f)) << f;
  }
}

TEST(Fp16Test, TiesAndEdges) {
  // Midpoints between neighbours go to the even mantissa.
  for (std::uint16_t h = 0; h < 0x7bff; ++h) {
    const double mid = (half_value(h) + half_value(h + 1)) / 2.0;
    const float f = static_cast<float>(mid);
    if (static_cast<double>(f) != mid) continue;
    EXPECT_EQ(float_to_half(f).bits, (h & 1) ? h + 1 : h) << h;
  }
  EXPECT_EQ(float_to_half(65504.0f).bits, 0x7bff);
  EXPECT_EQ(float_to_half(65519.99f).bits, 0x7bff);
  EXPECT_EQ(float_to_half(65520.0f).bits, 0x7c00);
  EXPECT_EQ(float_to_half(-INFINITY).bits, 0xfc00);
  EXPECT_EQ(float_to_half(-0.0f).bits, 0x8000);
  EXPECT_EQ(float_to_half(std::ldexp(1.0f, -25)).bits, 0x0000);
  EXPECT_EQ(float_to_half(std::nextafter(std::ldexp(1.0f, -25), 1.0f)).bits, 0x0001);
  EXPECT_TRUE(std::isnan(half_to_float(float_to_half(NAN))));
}

}  // namespace
}  // namespace nf4
