// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nf4/dequant.hpp"
#include "nf4/quantize.hpp"

namespace nf4::bench {

// splitmix64; the exact generator is fixed so checksums are portable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in (0, 1], 53-bit resolution.
  double uniform() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Standard normal samples via Box-Muller (both outputs used), rounded to
// float.
std::vector<float> standard_normal(std::size_t n, std::uint64_t seed);

// FNV-1a over the little-endian bytes of each value.
std::uint64_t checksum(std::span<const float> values);

struct BenchSpec {
  std::uint64_t n_elements = 1u << 24;
  DecoderKind decoder = DecoderKind::kDirectLut;
  std::uint32_t workers = 1;
  std::uint32_t warmup_passes = 1;
  std::uint32_t measured_passes = 3;
  std::uint64_t seed = 0;
  std::uint32_t tile_elems = 512;
};

struct BenchReport {
  BenchSpec spec;
  std::vector<double> pass_seconds;
  double mean_seconds = 0.0;
  double elements_per_second = 0.0;
  double input_bytes_per_second = 0.0;  // packed nibbles + absmax
  std::uint64_t checksum = 0;
};

// Generates seeded normal data, quantizes it (untimed), runs the warmup
// passes untimed and then times each measured dequantize call. Throws
// nf4::Error(kAllocation) before timing if the buffers cannot be allocated,
// and nf4::Error(kInvalidArgument) for an invalid spec.
BenchReport run_bench(const BenchSpec& spec);

// Same protocol on an already quantized tensor; spec.n_elements must equal
// qt.n and spec.seed is only echoed.
BenchReport run_bench(const BenchSpec& spec, const QuantizedTensor& qt);

struct DecoderComparison {
  BenchReport tree;
  BenchReport lut;
  double speedup = 0.0;  // mean(tree) / mean(lut)
};

// Both decoders on the identical quantized input.
DecoderComparison compare(std::uint64_t n_elements, std::uint32_t workers, std::uint64_t seed,
                          std::uint32_t warmup_passes = 1, std::uint32_t measured_passes = 3);

double compare_decoders(std::uint64_t n_elements, std::uint32_t workers, std::uint64_t seed);

// One header row, then one row per report.
void write_csv(std::ostream& os, std::span<const BenchReport> reports);

// Static SVG with two bar panels (mean latency and throughput), one bar per
// report.
void write_svg_plot(std::ostream& os, std::span<const BenchReport> reports);

}  // namespace nf4::bench
