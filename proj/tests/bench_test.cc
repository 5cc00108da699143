// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/bench.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "nf4/error.hpp"

namespace nf4::bench {
namespace {

TEST(BenchTest, SplitMixReferenceSequence) {
  // First outputs of splitmix64 seeded with 0.
  SplitMix64 rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafull);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ull);
  EXPECT_EQ(rng.next(), 0x06c45d188009454full);
}

TEST(BenchTest, NormalSamplesLookNormal) {
  const auto v = standard_normal(200001, 42);
  ASSERT_EQ(v.size(), 200001u);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double var = 0.0;
  for (float x : v) var += (x - mean) * (x - mean);
  var /= v.size();
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
  EXPECT_EQ(standard_normal(1000, 42), std::vector<float>(v.begin(), v.begin() + 1000));
}

TEST(BenchTest, SameSeedSameChecksum) {
  BenchSpec spec;
  spec.n_elements = 100000;
  spec.seed = 7;
  const auto a = run_bench(spec);
  const auto b = run_bench(spec);
  EXPECT_EQ(a.checksum, b.checksum);
  spec.seed = 8;
  EXPECT_NE(run_bench(spec).checksum, a.checksum);
}

TEST(BenchTest, DecodersShareChecksum) {
  BenchSpec spec;
  spec.n_elements = 54321;
  spec.seed = 3;
  spec.decoder = DecoderKind::kTree;
  const auto tree = run_bench(spec);
  spec.decoder = DecoderKind::kDirectLut;
  spec.workers = 4;
  EXPECT_EQ(run_bench(spec).checksum, tree.checksum);
}

TEST(BenchTest, MeanOfMeasuredPasses) {
  BenchSpec spec;
  spec.n_elements = 4096;
  const auto r = run_bench(spec);
  ASSERT_EQ(r.pass_seconds.size(), 3u);
  EXPECT_DOUBLE_EQ(r.mean_seconds, (r.pass_seconds[0] + r.pass_seconds[1] + r.pass_seconds[2]) / 3.0);
  EXPECT_GT(r.mean_seconds, 0.0);
  EXPECT_DOUBLE_EQ(r.elements_per_second, 4096.0 / r.mean_seconds);
  EXPECT_DOUBLE_EQ(r.input_bytes_per_second, (2048.0 + 4 * 64) / r.mean_seconds);

  spec.measured_passes = 5;
  spec.warmup_passes = 0;
  EXPECT_EQ(run_bench(spec).pass_seconds.size(), 5u);
}

TEST(BenchTest, InvalidSpecs) {
  BenchSpec spec;
  spec.n_elements = 0;
  EXPECT_THROW(run_bench(spec), Error);
  spec.n_elements = 10;
  spec.measured_passes = 0;
  EXPECT_THROW(run_bench(spec), Error);
  spec.measured_passes = 1;
  spec.workers = 0;
  EXPECT_THROW(run_bench(spec), Error);
}

TEST(BenchTest, HugeAllocationFailsBeforeTiming) {
  BenchSpec spec;
  spec.n_elements = std::uint64_t{1} << 62;
  try {
    run_bench(spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAllocation);
  }
}

TEST(BenchTest, CompareDecodersPositive) {
  const auto cmp = compare(200000, 1, 1);
  EXPECT_GT(cmp.speedup, 0.0);
  EXPECT_EQ(cmp.tree.checksum, cmp.lut.checksum);
  EXPECT_GT(compare_decoders(10000, 2, 5), 0.0);
}

TEST(BenchTest, CsvAndPlot) {
  const auto cmp = compare(5000, 1, 1);
  const std::vector<BenchReport> reports = {cmp.tree, cmp.lut};
  std::ostringstream csv;
  write_csv(csv, reports);
  std::string line;
  std::istringstream in(csv.str());
  std::getline(in, line);
  EXPECT_EQ(line,
            "n_elements,decoder,workers,tile_elems,warmup_passes,measured_passes,seed,pass0_s,"
            "pass1_s,pass2_s,mean_s,elements_per_s,input_bytes_per_s,checksum");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("5000,tree,1,512,1,3,1,", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("5000,lut,1,512,1,3,1,", 0), 0u);

  std::ostringstream svg;
  write_svg_plot(svg, reports);
  EXPECT_EQ(svg.str().rfind("<svg", 0), 0u);
  EXPECT_NE(svg.str().find("</svg>"), std::string::npos);
}

}  // namespace
}  // namespace nf4::bench
