// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/costmodel.hpp"

#include <cmath>

#include "nf4/error.hpp"

namespace nf4::model {

namespace {

[[noreturn]] void bad(const char* what) { throw Error(ErrorKind::kInvalidArgument, what); }

}  // namespace

LutTraffic lut_traffic(const KernelGeometry& geom) {
  if (geom.lanes_per_block == 0 || geom.lut_bytes == 0 || geom.elems_per_lane == 0) {
    bad("kernel geometry must be positive");
  }
  LutTraffic t;
  t.baseline_bytes = geom.lanes_per_block * geom.lut_bytes;
  t.optimized_bytes = geom.lut_bytes;
  t.ratio = static_cast<double>(geom.lanes_per_block);
  return t;
}

InstructionReduction instruction_reduction(std::uint32_t baseline, std::uint32_t optimized) {
  if (baseline == 0 || optimized == 0) bad("instruction counts must be positive");
  if (optimized > baseline) bad("optimized instruction count exceeds baseline");
  return {baseline, optimized,
          static_cast<double>(baseline - optimized) / static_cast<double>(baseline)};
}

LatencyAdvantage latency_advantage(const CycleCosts& c) {
  const bool finite = std::isfinite(c.global_access) && std::isfinite(c.shared_read) &&
                      std::isfinite(c.shared_write);
  if (!finite || c.global_access <= 0.0 || c.shared_read <= 0.0 || c.shared_write <= 0.0) {
    bad("cycle costs must be positive and finite");
  }
  if (c.global_access < c.shared_read) bad("global access cannot be cheaper than a shared read");
  return {c.global_access / c.shared_read, c.global_access / c.shared_write};
}

double amdahl_projection(double f, double s) {
  if (!(f >= 0.0 && f <= 1.0)) bad("overhead fraction must be in [0, 1]");
  if (!(s > 0.0) || !std::isfinite(s)) bad("kernel speedup must be positive and finite");
  return 1.0 / ((1.0 - f) + f / s);
}

CostModelResult evaluate(const KernelGeometry& geom, const CycleCosts& c,
                         std::uint32_t baseline_instrs, std::uint32_t optimized_instrs) {
  const auto traffic = lut_traffic(geom);
  const auto instrs = instruction_reduction(baseline_instrs, optimized_instrs);
  const auto latency = latency_advantage(c);
  return {traffic.baseline_bytes, traffic.optimized_bytes, traffic.ratio,
          instrs.baseline,        instrs.optimized,        instrs.reduction,
          latency.lo,             latency.hi};
}

}  // namespace nf4::model
