// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/fp16.hpp"

#include <bit>

namespace nf4 {

Half float_to_half(float f) noexcept {
  const std::uint32_t x = std::bit_cast<std::uint32_t>(f);
  const std::uint32_t sign = (x >> 16) & 0x8000u;
  std::uint32_t a = x & 0x7fffffffu;

  if (a >= 0x7f800000u) {
    const std::uint32_t nan = a > 0x7f800000u ? (0x200u | ((a >> 13) & 0x3ffu)) : 0u;
    return {static_cast<std::uint16_t>(sign | 0x7c00u | nan)};
  }
  // 65520 is the midpoint between 65504 and 2^16; the tie goes to the even
  // neighbour, which is infinity.
  if (a >= 0x477ff000u) return {static_cast<std::uint16_t>(sign | 0x7c00u)};

  if (a < 0x38800000u) {
    // Result is subnormal or zero. 2^-25 itself ties to zero.
    if (a <= 0x33000000u) return {static_cast<std::uint16_t>(sign)};
    const std::uint32_t exp = a >> 23;
    const std::uint32_t mant = (a & 0x7fffffu) | 0x800000u;
    const std::uint32_t shift = 126u - exp;
    std::uint32_t q = mant >> shift;
    const std::uint32_t rem = mant & ((1u << shift) - 1u);
    const std::uint32_t half = 1u << (shift - 1u);
    if (rem > half || (rem == half && (q & 1u))) ++q;
    return {static_cast<std::uint16_t>(sign | q)};
  }

  a += 0xfffu + ((a >> 13) & 1u);
  return {static_cast<std::uint16_t>(sign | ((a - 0x38000000u) >> 13))};
}

float half_to_float(Half h) noexcept {
  const std::uint32_t sign = static_cast<std::uint32_t>(h.bits & 0x8000u) << 16;
  const std::uint32_t exp = (h.bits >> 10) & 0x1fu;
  std::uint32_t mant = h.bits & 0x3ffu;

  std::uint32_t out;
  if (exp == 0x1fu) {
    out = sign | 0x7f800000u | (mant << 13);
  } else if (exp != 0) {
    out = sign | ((exp + 112u) << 23) | (mant << 13);
  } else if (mant == 0) {
    out = sign;
  } else {
    // Normalize the subnormal.
    std::uint32_t e = 113u;
    while ((mant & 0x400u) == 0) {
      mant <<= 1;
      --e;
    }
    out = sign | (e << 23) | ((mant & 0x3ffu) << 13);
  }
  return std::bit_cast<float>(out);
}

}  // namespace nf4
