// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/quantize.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nf4/error.hpp"

namespace nf4 {

std::optional<std::string> validate(const QuantizedTensor& qt) {
  if (qt.block_size != kBlockSize) return "unsupported block size";
  if (qt.packed.size() != packed_size(qt.n)) return "packed length does not match n";
  if (qt.absmax.size() != num_blocks(qt.n, qt.block_size)) {
    return "absmax length does not match n";
  }
  for (float s : qt.absmax) {
    if (!std::isfinite(s) || s < 0.0f) return "absmax entry negative or non-finite";
  }
  if (qt.n % 2 == 1 && (qt.packed.back() & 0x0Fu) != 0) return "non-zero pad nibble";
  if (qt.codebook_id.empty() || qt.codebook_id.size() > 255) return "bad codebook id";
  return std::nullopt;
}

namespace {

std::uint8_t nearest_in_lut(float x, const std::array<float, kNumCodes>& lut) {
  std::uint8_t best = 0;
  float best_dist = std::fabs(x - lut[0]);
  for (std::uint8_t i = 1; i < kNumCodes; ++i) {
    const float d = std::fabs(x - lut[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

}  // namespace

std::uint8_t nearest_code_index(float x_norm, const Codebook& cb) {
  if (!std::isfinite(x_norm)) throw Error(ErrorKind::kNonFinite, "non-finite value");
  return nearest_in_lut(x_norm, to_lut(cb));
}

std::vector<std::uint8_t> pack_nibbles(std::span<const std::uint8_t> indices) {
  std::vector<std::uint8_t> out(packed_size(indices.size()), 0);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const std::uint8_t q = indices[k];
    if (q > 0x0F) {
      throw Error(ErrorKind::kInvalidArgument,
                  "nibble index out of range at position " + std::to_string(k));
    }
    out[k / 2] |= (k % 2 == 0) ? static_cast<std::uint8_t>(q << 4) : q;
  }
  return out;
}

std::vector<std::uint8_t> unpack_nibbles(std::span<const std::uint8_t> packed, std::size_t n) {
  if (packed.size() < packed_size(n)) {
    throw Error(ErrorKind::kInvalidArgument, "packed buffer too short");
  }
  std::vector<std::uint8_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint8_t b = packed[k / 2];
    out[k] = (k % 2 == 0) ? static_cast<std::uint8_t>(b >> 4) : static_cast<std::uint8_t>(b & 0x0F);
  }
  return out;
}

QuantizedTensor quantize_blockwise(std::span<const float> values, const Codebook& cb) {
  const auto lut = to_lut(cb);
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw Error(ErrorKind::kNonFinite, "non-finite value at position " + std::to_string(k));
    }
  }

  QuantizedTensor qt;
  qt.n = values.size();
  qt.codebook_id = cb.id;
  qt.absmax.resize(num_blocks(qt.n));
  qt.packed.assign(packed_size(qt.n), 0);

  for (std::size_t b = 0; b < qt.absmax.size(); ++b) {
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min<std::size_t>(begin + kBlockSize, values.size());

    float scale = 0.0f;
    for (std::size_t k = begin; k < end; ++k) scale = std::max(scale, std::fabs(values[k]));
    qt.absmax[b] = scale;

    for (std::size_t k = begin; k < end; ++k) {
      const std::uint8_t q =
          scale == 0.0f ? static_cast<std::uint8_t>(kZeroCode) : nearest_in_lut(values[k] / scale, lut);
      qt.packed[k / 2] |= (k % 2 == 0) ? static_cast<std::uint8_t>(q << 4) : q;
    }
  }
  return qt;
}

}  // namespace nf4
