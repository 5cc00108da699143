// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace nf4 {

// IEEE 754 binary16 storage.
struct Half {
  std::uint16_t bits = 0;

  bool operator==(const Half&) const = default;
};

// Round-to-nearest-even conversion. Overflow goes to infinity; NaN stays NaN
// (quiet, payload truncated).
Half float_to_half(float f) noexcept;

// Exact widening.
float half_to_float(Half h) noexcept;

}  // namespace nf4
