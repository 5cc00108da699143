// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nf4/codebook.hpp"
#include "nf4/fp16.hpp"
#include "nf4/quantize.hpp"

namespace nf4 {

enum class DecoderKind { kTree, kDirectLut };

enum class OutputPrecision { kFloat32, kFloat16 };

std::string_view to_string(DecoderKind d);
// Accepts "tree" and "lut" (also "direct-lut"). Throws nf4::Error otherwise.
DecoderKind parse_decoder(std::string_view s);

// Tile geometry for the executor. A tile is the unit of work handed to a
// worker and the scope of one LUT staging copy; the defaults mirror a
// 64-lane block that decodes 8 elements per lane.
struct ExecConfig {
  std::uint32_t tile_elems = 512;
  std::uint32_t lanes = 64;
  std::uint32_t elems_per_lane = 8;
  std::uint32_t workers = 1;
  OutputPrecision output_precision = OutputPrecision::kFloat32;
};

std::optional<std::string> validate(const ExecConfig& cfg);

// Direct table lookup. Throws nf4::Error for q > 15.
float decode_nibble_lut(std::uint8_t q, const Codebook& cb);

// Baseline decoder: a 4-level branch tree on bits 3..0 with the canonical
// levels as literal leaves. Throws nf4::Error for q > 15.
float decode_nibble_tree(std::uint8_t q);

// (cb[b >> 4] * scale, cb[b & 0xF] * scale) in float32.
std::pair<float, float> dequantize_byte(std::uint8_t b, float scale, const Codebook& cb);

// Same, through the chosen decoder and rounded to the chosen precision. The
// float16 variant returns the rounded value widened back to float.
std::pair<float, float> dequantize_byte(std::uint8_t b, float scale, DecoderKind decoder,
                                        OutputPrecision precision, const Codebook& cb);

// Element k = decode(nibble_k) * absmax[k / 64]. In float16 mode the float32
// product is rounded to nearest-even binary16 and widened back (exact). The
// result is bit-identical for both decoders and any worker count.
std::vector<float> dequantize_blockwise(const QuantizedTensor& qt, DecoderKind decoder,
                                        const ExecConfig& cfg, const Codebook& cb);

// In-place variants; `out` must hold exactly qt.n elements.
void dequantize_into(const QuantizedTensor& qt, DecoderKind decoder, const ExecConfig& cfg,
                     const Codebook& cb, std::span<float> out);
// Always produces binary16, regardless of cfg.output_precision.
void dequantize_into(const QuantizedTensor& qt, DecoderKind decoder, const ExecConfig& cfg,
                     const Codebook& cb, std::span<Half> out);

}  // namespace nf4
