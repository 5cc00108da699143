// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/dequant.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <thread>

#include "nf4/error.hpp"

namespace nf4 {

std::string_view to_string(DecoderKind d) {
  return d == DecoderKind::kTree ? "tree" : "lut";
}

DecoderKind parse_decoder(std::string_view s) {
  if (s == "tree") return DecoderKind::kTree;
  if (s == "lut" || s == "direct-lut") return DecoderKind::kDirectLut;
  throw Error(ErrorKind::kInvalidArgument, "unknown decoder '" + std::string(s) + "'");
}

std::optional<std::string> validate(const ExecConfig& cfg) {
  if (cfg.tile_elems == 0 || cfg.lanes == 0 || cfg.elems_per_lane == 0) {
    return "tile geometry must be positive";
  }
  if (static_cast<std::uint64_t>(cfg.lanes) * cfg.elems_per_lane != cfg.tile_elems) {
    return "tile_elems must equal lanes * elems_per_lane";
  }
  if (cfg.tile_elems % 2 != 0) return "tile_elems must be even";
  if (cfg.workers == 0) return "workers must be at least 1";
  return std::nullopt;
}

namespace {

// clang-format off
inline float tree_decode(std::uint8_t q) noexcept {
  if (q & 0b1000) {
    if (q & 0b0100) {
      if (q & 0b0010) {
        if (q & 0b0001) return 1.0f;
        else return 0.7229568362236023f;
      } else {
        if (q & 0b0001) return 0.5626170039176941f;
        else return 0.44070982933044434f;
      }
    } else {
      if (q & 0b0010) {
        if (q & 0b0001) return 0.33791524171829224f;
        else return 0.24611230194568634f;
      } else {
        if (q & 0b0001) return 0.16093020141124725f;
        else return 0.07958029955625534f;
      }
    }
  } else {
    if (q & 0b0100) {
      if (q & 0b0010) {
        if (q & 0b0001) return 0.0f;
        else return -0.09105003625154495f;
      } else {
        if (q & 0b0001) return -0.18477343022823334f;
        else return -0.28444138169288635f;
      }
    } else {
      if (q & 0b0010) {
        if (q & 0b0001) return -0.39491748809814453f;
        else return -0.5250730514526367f;
      } else {
        if (q & 0b0001) return -0.6961928009986877f;
        else return -1.0f;
      }
    }
  }
}
// clang-format on

using Lut = std::array<float, kNumCodes>;

template <DecoderKind D>
inline float decode(std::uint8_t q, const Lut& lut) noexcept {
  if constexpr (D == DecoderKind::kTree) {
    return tree_decode(q);
  } else {
    return lut[q];
  }
}

template <OutputPrecision P>
inline void store(float v, float* dst) noexcept {
  if constexpr (P == OutputPrecision::kFloat16) {
    *dst = half_to_float(float_to_half(v));
  } else {
    *dst = v;
  }
}

template <OutputPrecision>
inline void store(float v, Half* dst) noexcept {
  *dst = float_to_half(v);
}

void check_inputs(const QuantizedTensor& qt, const ExecConfig& cfg, const Codebook& cb,
                  DecoderKind decoder, std::size_t out_size) {
  if (auto why = validate(cb)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid codebook: " + *why);
  }
  if (qt.codebook_id != cb.id) {
    throw Error(ErrorKind::kCodebookMismatch,
                "codebook mismatch: tensor uses '" + qt.codebook_id + "', got '" + cb.id + "'");
  }
  if (decoder == DecoderKind::kTree &&
      !std::equal(cb.values.begin(), cb.values.end(), kNf4Values.begin())) {
    throw Error(ErrorKind::kInvalidArgument, "tree decoder only encodes the canonical NF4 table");
  }
  if (auto why = validate(qt)) throw Error(ErrorKind::kInvalidTensor, "invalid tensor: " + *why);
  if (auto why = validate(cfg)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid exec config: " + *why);
  }
  if (out_size != qt.n) {
    throw Error(ErrorKind::kInvalidArgument, "output size does not match element count");
  }
}

// Decodes elements [begin, end) of one tile. `begin` is even, so every byte
// read here belongs to this tile.
template <DecoderKind D, OutputPrecision P, class Out>
void decode_tile(const std::uint8_t* packed, const float* absmax, std::uint64_t begin,
                 std::uint64_t end, const Lut& table, Out* out) {
  const Lut lut = table;  // per-tile staging copy
  std::uint64_t k = begin;
  while (k < end) {
    const std::uint64_t block = k / kBlockSize;
    const float scale = absmax[block];
    const std::uint64_t block_end = std::min<std::uint64_t>(end, (block + 1) * kBlockSize);
    for (; k + 1 < block_end; k += 2) {
      const std::uint8_t b = packed[k / 2];
      store<P>(decode<D>(b >> 4, lut) * scale, out + k);
      store<P>(decode<D>(b & 0x0F, lut) * scale, out + k + 1);
    }
    if (k < block_end) {
      store<P>(decode<D>(packed[k / 2] >> 4, lut) * scale, out + k);
      ++k;
    }
  }
}

template <DecoderKind D, OutputPrecision P, class Out>
void run_tiles(const QuantizedTensor& qt, const ExecConfig& cfg, const Lut& lut, Out* out) {
  const std::uint64_t tile = cfg.tile_elems;
  const std::uint64_t num_tiles = (qt.n + tile - 1) / tile;
  const std::uint8_t* packed = qt.packed.data();
  const float* absmax = qt.absmax.data();
  const std::uint64_t n = qt.n;

  auto do_tile = [&](std::uint64_t t) {
    const std::uint64_t begin = t * tile;
    decode_tile<D, P>(packed, absmax, begin, std::min(begin + tile, n), lut, out);
  };

  const std::uint64_t workers = std::min<std::uint64_t>(cfg.workers, num_tiles);
  if (workers <= 1) {
    for (std::uint64_t t = 0; t < num_tiles; ++t) do_tile(t);
    return;
  }

  // Tiles are claimed in chunks to keep the shared counter off the hot path.
  const std::uint64_t chunk = std::max<std::uint64_t>(1, num_tiles / (workers * 16));
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::uint64_t first = next.fetch_add(chunk, std::memory_order_relaxed);
      if (first >= num_tiles) return;
      const std::uint64_t last = std::min(first + chunk, num_tiles);
      for (std::uint64_t t = first; t < last; ++t) do_tile(t);
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::uint64_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
}

template <OutputPrecision P, class Out>
void dispatch_decoder(const QuantizedTensor& qt, DecoderKind decoder, const ExecConfig& cfg,
                      const Lut& lut, Out* out) {
  if (decoder == DecoderKind::kTree) {
    run_tiles<DecoderKind::kTree, P>(qt, cfg, lut, out);
  } else {
    run_tiles<DecoderKind::kDirectLut, P>(qt, cfg, lut, out);
  }
}

}  // namespace

float decode_nibble_lut(std::uint8_t q, const Codebook& cb) {
  if (q > 0x0F) throw Error(ErrorKind::kInvalidArgument, "nibble out of range");
  if (cb.values.size() != kNumCodes) {
    throw Error(ErrorKind::kInvalidArgument, "invalid codebook: wrong length");
  }
  return cb.values[q];
}

float decode_nibble_tree(std::uint8_t q) {
  if (q > 0x0F) throw Error(ErrorKind::kInvalidArgument, "nibble out of range");
  return tree_decode(q);
}

std::pair<float, float> dequantize_byte(std::uint8_t b, float scale, const Codebook& cb) {
  return dequantize_byte(b, scale, DecoderKind::kDirectLut, OutputPrecision::kFloat32, cb);
}

std::pair<float, float> dequantize_byte(std::uint8_t b, float scale, DecoderKind decoder,
                                        OutputPrecision precision, const Codebook& cb) {
  const float hi = decoder == DecoderKind::kTree ? decode_nibble_tree(b >> 4)
                                                 : decode_nibble_lut(b >> 4, cb);
  const float lo = decoder == DecoderKind::kTree ? decode_nibble_tree(b & 0x0F)
                                                 : decode_nibble_lut(b & 0x0F, cb);
  std::pair<float, float> out{hi * scale, lo * scale};
  if (precision == OutputPrecision::kFloat16) {
    out.first = half_to_float(float_to_half(out.first));
    out.second = half_to_float(float_to_half(out.second));
  }
  return out;
}

void dequantize_into(const QuantizedTensor& qt, DecoderKind decoder, const ExecConfig& cfg,
                     const Codebook& cb, std::span<float> out) {
  check_inputs(qt, cfg, cb, decoder, out.size());
  const Lut lut = to_lut(cb);
  if (cfg.output_precision == OutputPrecision::kFloat16) {
    dispatch_decoder<OutputPrecision::kFloat16>(qt, decoder, cfg, lut, out.data());
  } else {
    dispatch_decoder<OutputPrecision::kFloat32>(qt, decoder, cfg, lut, out.data());
  }
}

void dequantize_into(const QuantizedTensor& qt, DecoderKind decoder, const ExecConfig& cfg,
                     const Codebook& cb, std::span<Half> out) {
  check_inputs(qt, cfg, cb, decoder, out.size());
  const Lut lut = to_lut(cb);
  dispatch_decoder<OutputPrecision::kFloat16>(qt, decoder, cfg, lut, out.data());
}

std::vector<float> dequantize_blockwise(const QuantizedTensor& qt, DecoderKind decoder,
                                        const ExecConfig& cfg, const Codebook& cb) {
  std::vector<float> out(qt.n);
  dequantize_into(qt, decoder, cfg, cb, std::span<float>(out));
  return out;
}

}  // namespace nf4
