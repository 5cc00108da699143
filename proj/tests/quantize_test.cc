// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/quantize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "nf4/dequant.hpp"
#include "nf4/error.hpp"

namespace nf4 {
namespace {

// Exhaustive nearest level in double; ties to the smaller index.
int brute_nearest(double x) {
  int best = 0;
  for (int i = 1; i < 16; ++i) {
    if (std::fabs(x - kNf4Values[i]) < std::fabs(x - kNf4Values[best])) best = i;
  }
  return best;
}

TEST(QuantizeTest, NearestCodeExamples) {
  const auto& cb = canonical_nf4();
  EXPECT_EQ(nearest_code_index(0.0f, cb), 7);
  EXPECT_EQ(nearest_code_index(1.0f, cb), 15);
  EXPECT_EQ(brute_nearest(-0.6), 2);
  EXPECT_EQ(nearest_code_index(-0.6f, cb), 2);
}

TEST(QuantizeTest, NearestCodeEveryLevelMapsToItself) {
  for (int i = 0; i < 16; ++i) EXPECT_EQ(nearest_code_index(kNf4Values[i], canonical_nf4()), i);
}

TEST(QuantizeTest, NearestCodeAgreesWithBruteForce) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  for (int i = 0; i < 100000; ++i) {
    const float x = u(rng);
    ASSERT_EQ(nearest_code_index(x, canonical_nf4()), brute_nearest(x)) << x;
  }
}

TEST(QuantizeTest, NearestCodeTiesGoToSmallerIndex) {
  // A synthetic table whose midpoint 0.25 between 0 and 0.5 is exact in float.
  Codebook cb = canonical_nf4();
  cb.values = {-1.0f, -0.9f, -0.8f, -0.7f, -0.6f, -0.5f, -0.25f, 0.0f,
               0.5f,  0.6f,  0.7f,  0.8f,  0.85f, 0.9f, 0.95f, 1.0f};
  ASSERT_FALSE(validate(cb).has_value());
  EXPECT_EQ(nearest_code_index(0.25f, cb), 7);
  EXPECT_EQ(nearest_code_index(-0.125f, cb), 6);
}

TEST(QuantizeTest, NearestCodeRejectsNonFinite) {
  EXPECT_THROW(nearest_code_index(NAN, canonical_nf4()), Error);
  EXPECT_THROW(nearest_code_index(INFINITY, canonical_nf4()), Error);
}

TEST(QuantizeTest, PackNibbleExamples) {
  EXPECT_EQ(pack_nibbles(std::vector<std::uint8_t>{15, 0}), (std::vector<std::uint8_t>{0xF0}));
  EXPECT_EQ(pack_nibbles(std::vector<std::uint8_t>{7}), (std::vector<std::uint8_t>{0x70}));
  EXPECT_EQ(pack_nibbles(std::vector<std::uint8_t>{1, 2, 3, 4}),
            (std::vector<std::uint8_t>{0x12, 0x34}));
  EXPECT_TRUE(pack_nibbles(std::vector<std::uint8_t>{}).empty());
  EXPECT_THROW(pack_nibbles(std::vector<std::uint8_t>{1, 16}), Error);
}

TEST(QuantizeTest, UnpackInvertsPackForRandomSequences) {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> nib(0, 15), len(0, 300);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> idx(static_cast<std::size_t>(len(rng)));
    for (auto& q : idx) q = static_cast<std::uint8_t>(nib(rng));
    const auto packed = pack_nibbles(idx);
    ASSERT_EQ(packed.size(), (idx.size() + 1) / 2);
    ASSERT_EQ(unpack_nibbles(packed, idx.size()), idx);
  }
}

TEST(QuantizeTest, AllZeroBlock) {
  const auto qt = quantize_blockwise(std::vector<float>(64, 0.0f), canonical_nf4());
  EXPECT_EQ(qt.n, 64u);
  EXPECT_EQ(qt.absmax, std::vector<float>{0.0f});
  EXPECT_EQ(qt.packed, std::vector<std::uint8_t>(32, 0x77));
  EXPECT_FALSE(validate(qt).has_value());
}

TEST(QuantizeTest, ScaledLevelsQuantizeToTheirOwnIndex) {
  std::vector<float> values(64, 0.0f);
  for (int i = 0; i < 16; ++i) values[i] = 2.0f * kNf4Values[i];
  const auto qt = quantize_blockwise(values, canonical_nf4());
  EXPECT_EQ(qt.absmax, std::vector<float>{2.0f});
  const std::vector<std::uint8_t> head(qt.packed.begin(), qt.packed.begin() + 8);
  EXPECT_EQ(head, (std::vector<std::uint8_t>{0x01, 0x23, 0x45, 0x67, 0x89, 0xAB, 0xCD, 0xEF}));
  for (std::size_t j = 8; j < 32; ++j) EXPECT_EQ(qt.packed[j], 0x77);
}

TEST(QuantizeTest, SingleNegativeElement) {
  const auto qt = quantize_blockwise(std::vector<float>{-3.0f}, canonical_nf4());
  EXPECT_EQ(qt.n, 1u);
  EXPECT_EQ(qt.absmax, std::vector<float>{3.0f});
  EXPECT_EQ(qt.packed, std::vector<std::uint8_t>{0x00});
}

TEST(QuantizeTest, EmptyInput) {
  const auto qt = quantize_blockwise(std::vector<float>{}, canonical_nf4());
  EXPECT_EQ(qt.n, 0u);
  EXPECT_TRUE(qt.packed.empty());
  EXPECT_TRUE(qt.absmax.empty());
}

TEST(QuantizeTest, NonFiniteNamesPosition) {
  std::vector<float> v(100, 1.0f);
  v[77] = NAN;
  try {
    quantize_blockwise(v, canonical_nf4());
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonFinite);
    EXPECT_NE(std::string(e.what()).find("77"), std::string::npos);
  }
}

TEST(QuantizeTest, OddLengthPadsLowNibbleWithZero) {
  std::mt19937 rng(3);
  std::normal_distribution<float> g;
  for (std::size_t n : {1u, 3u, 63u, 65u, 129u, 1023u}) {
    std::vector<float> v(n);
    for (auto& x : v) x = g(rng);
    const auto qt = quantize_blockwise(v, canonical_nf4());
    EXPECT_EQ(qt.packed.size(), (n + 1) / 2);
    EXPECT_EQ(qt.absmax.size(), (n + 63) / 64);
    EXPECT_EQ(qt.packed.back() & 0x0F, 0);
  }
}

TEST(QuantizeTest, RoundtripWithinHalfGap) {
  std::mt19937 rng(11);
  std::normal_distribution<float> g;
  std::vector<float> v(5000);
  for (auto& x : v) x = 3.0f * g(rng);
  const auto& cb = canonical_nf4();
  const auto qt = quantize_blockwise(v, cb);
  const auto back = dequantize_blockwise(qt, DecoderKind::kDirectLut, {}, cb);
  const double h = half_max_gap(cb);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const float a = qt.absmax[k / 64];
    const double ulp = std::nextafter(a, INFINITY) - a;
    ASSERT_LE(std::fabs(static_cast<double>(v[k]) - back[k]), h * a + ulp) << k;
  }
}

TEST(QuantizeTest, ValidateCatchesStructuralErrors) {
  auto qt = quantize_blockwise(std::vector<float>(65, 1.0f), canonical_nf4());
  ASSERT_FALSE(validate(qt).has_value());
  auto bad = qt;
  bad.packed.pop_back();
  EXPECT_TRUE(validate(bad).has_value());
  bad = qt;
  bad.absmax.push_back(1.0f);
  EXPECT_TRUE(validate(bad).has_value());
  bad = qt;
  bad.absmax[0] = -1.0f;
  EXPECT_TRUE(validate(bad).has_value());
  bad = qt;
  bad.absmax[1] = INFINITY;
  EXPECT_TRUE(validate(bad).has_value());
  bad = qt;
  bad.packed.back() |= 0x01;
  EXPECT_EQ(validate(bad), "non-zero pad nibble");
  bad = qt;
  bad.block_size = 32;
  EXPECT_TRUE(validate(bad).has_value());
}

}  // namespace
}  // namespace nf4
