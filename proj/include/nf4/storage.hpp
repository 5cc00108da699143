// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nf4/quantize.hpp"

// NF4K container, little-endian throughout:
//
//   offset  size  field
//   0       4     magic "NF4K"
//   4       2     version (1)
//   6       2     flags (bit 0: odd n, final low nibble is padding)
//   8       8     n, element count
//   16      4     block_size (64)
//   20      1     codebook id length L
//   21      L     codebook id, UTF-8
//   21+L    4*B   absmax, float32, B = ceil(n / 64)
//   ...     P     packed nibbles, P = ceil(n / 2)
//   ...     4     CRC-32 (IEEE) of every preceding byte
namespace nf4::storage {

inline constexpr std::uint8_t kMagic[4] = {'N', 'F', '4', 'K'};
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::uint16_t kFlagOddPad = 0x0001;
inline constexpr std::size_t kFixedHeaderBytes = 21;

// Exact file size for a tensor of n elements with an id of id_len bytes.
std::uint64_t container_size(std::uint64_t n, std::size_t id_len);

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize(const QuantizedTensor& qt);

// Returns the number of bytes written. Throws nf4::Error(kInvalidTensor) for
// an invalid tensor and nf4::Error(kIo) if the stream fails.
std::size_t write_container(const QuantizedTensor& qt, std::ostream& sink);

// Validates magic, version, length, CRC and then the tensor invariants.
// Errors: "not an NF4K file", "unsupported version", "truncated", "corrupt".
QuantizedTensor deserialize(std::span<const std::uint8_t> bytes);

QuantizedTensor read_container(std::istream& source);

}  // namespace nf4::storage
