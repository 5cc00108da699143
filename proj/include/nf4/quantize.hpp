// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nf4/codebook.hpp"

namespace nf4 {

inline constexpr std::uint32_t kBlockSize = 64;

inline constexpr std::size_t packed_size(std::uint64_t n) {
  return static_cast<std::size_t>(n / 2 + n % 2);
}
inline constexpr std::size_t num_blocks(std::uint64_t n, std::uint32_t block_size = kBlockSize) {
  return static_cast<std::size_t>(n / block_size + (n % block_size != 0 ? 1 : 0));
}

// Packed 4-bit indices with one float32 absmax scale per 64-element block.
// Element k lives in the high nibble of packed[k / 2] when k is even and in
// the low nibble when k is odd.
struct QuantizedTensor {
  std::vector<std::uint8_t> packed;
  std::vector<float> absmax;
  std::uint64_t n = 0;
  std::uint32_t block_size = kBlockSize;
  std::string codebook_id = kNf4CodebookId;

  bool operator==(const QuantizedTensor&) const = default;
};

// First violated structural invariant, or nullopt.
std::optional<std::string> validate(const QuantizedTensor& qt);

// argmin_i |x - cb.values[i]| computed in float, ties to the smaller index.
// Throws nf4::Error(kNonFinite) for NaN or infinity.
std::uint8_t nearest_code_index(float x_norm, const Codebook& cb);

// byte[j] = indices[2j] << 4 | indices[2j+1]; an odd tail is padded with 0.
std::vector<std::uint8_t> pack_nibbles(std::span<const std::uint8_t> indices);

// Inverse of pack_nibbles for the first n indices.
std::vector<std::uint8_t> unpack_nibbles(std::span<const std::uint8_t> packed, std::size_t n);

// Blockwise absmax quantization. An all-zero block stores absmax 0 and the
// exact-zero code for every element. Blocks are independent; the result does
// not depend on how they are scheduled.
QuantizedTensor quantize_blockwise(std::span<const float> values, const Codebook& cb);

}  // namespace nf4
