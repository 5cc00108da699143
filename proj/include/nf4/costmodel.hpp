// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

// Analytic model of the shared-LUT dequantization kernel on a GPU: LUT
// traffic per thread block, indexing instruction counts, on-chip vs. global
// latency ratios, and an Amdahl projection to end-to-end speedup. All
// hardware figures are inputs with A100 defaults.
namespace nf4::model {

struct KernelGeometry {
  std::uint64_t lanes_per_block = 64;
  std::uint64_t lut_bytes = 64;  // 16 float32 levels
  std::uint64_t elems_per_lane = 8;
};

// Ampere cycle figures: global load vs. shared-memory read / write.
struct CycleCosts {
  double global_access = 290.0;
  double shared_read = 23.0;
  double shared_write = 19.0;
};

struct LutTraffic {
  std::uint64_t baseline_bytes = 0;   // every lane fetches the table
  std::uint64_t optimized_bytes = 0;  // one fetch per block
  double ratio = 0.0;
};

struct InstructionReduction {
  std::uint32_t baseline = 7;
  std::uint32_t optimized = 2;
  double reduction = 0.0;  // fraction of baseline instructions removed
};

struct LatencyAdvantage {
  double lo = 0.0;  // global / shared read
  double hi = 0.0;  // global / shared write
};

struct CostModelResult {
  std::uint64_t baseline_lut_bytes_per_block = 0;
  std::uint64_t optimized_lut_bytes_per_block = 0;
  double traffic_ratio = 0.0;
  std::uint32_t baseline_instrs = 0;
  std::uint32_t optimized_instrs = 0;
  double instr_reduction = 0.0;
  double latency_ratio_lo = 0.0;
  double latency_ratio_hi = 0.0;
};

// Each throws nf4::Error(kInvalidArgument) on an invalid input.
LutTraffic lut_traffic(const KernelGeometry& geom = {});
InstructionReduction instruction_reduction(std::uint32_t baseline = 7, std::uint32_t optimized = 2);
LatencyAdvantage latency_advantage(const CycleCosts& c = {});

// 1 / ((1 - f) + f / s), for 0 <= f <= 1 and s > 0.
double amdahl_projection(double overhead_fraction, double kernel_speedup);

CostModelResult evaluate(const KernelGeometry& geom = {}, const CycleCosts& c = {},
                         std::uint32_t baseline_instrs = 7, std::uint32_t optimized_instrs = 2);

}  // namespace nf4::model
