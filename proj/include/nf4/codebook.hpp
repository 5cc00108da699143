// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace nf4 {

inline constexpr std::size_t kNumCodes = 16;
inline constexpr std::size_t kZeroCode = 7;

// The 16 NormalFloat4 levels as stored by bitsandbytes / QLoRA. Every entry
// is exactly representable in float32.
inline constexpr std::array<float, kNumCodes> kNf4Values = {
    -1.0f,
    -0.6961928009986877f,
    -0.5250730514526367f,
    -0.39491748809814453f,
    -0.28444138169288635f,
    -0.18477343022823334f,
    -0.09105003625154495f,
    0.0f,
    0.07958029955625534f,
    0.16093020141124725f,
    0.24611230194568634f,
    0.33791524171829224f,
    0.44070982933044434f,
    0.5626170039176941f,
    0.7229568362236023f,
    1.0f,
};

inline constexpr const char* kNf4CodebookId = "nf4-v1";

// A code table plus the tag that serialized tensors use to refer to it.
// `values` is a vector rather than a fixed array so malformed tables can be
// represented and rejected by validate().
struct Codebook {
  std::vector<float> values;
  std::string id;

  bool operator==(const Codebook&) const = default;
};

// The canonical NF4 table. Returns the same immutable object on every call.
const Codebook& canonical_nf4();

// Returns a description of the first violated invariant, or nullopt.
std::optional<std::string> validate(const Codebook& cb);

// Largest distance between adjacent levels, in double precision.
double max_adjacent_gap(const Codebook& cb);

// Worst-case distance from a normalized value in [-1, 1] to its nearest
// level: half the largest adjacent gap.
inline double half_max_gap(const Codebook& cb) {
  return max_adjacent_gap(cb) / 2.0;
}

// Copies the values into a fixed 16-entry table. Throws nf4::Error if the
// codebook is invalid.
std::array<float, kNumCodes> to_lut(const Codebook& cb);

}  // namespace nf4
