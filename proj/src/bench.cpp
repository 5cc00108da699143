// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <new>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "nf4/codebook.hpp"
#include "nf4/error.hpp"

namespace nf4::bench {

namespace {

template <class T>
std::vector<T> allocate(std::uint64_t n) {
  try {
    if (n > std::vector<T>().max_size()) throw std::bad_alloc();
    return std::vector<T>(static_cast<std::size_t>(n));
  } catch (const std::bad_alloc&) {
    throw Error(ErrorKind::kAllocation,
                "cannot allocate buffers for " + std::to_string(n) + " elements");
  } catch (const std::length_error&) {
    throw Error(ErrorKind::kAllocation,
                "cannot allocate buffers for " + std::to_string(n) + " elements");
  }
}

void check_spec(const BenchSpec& spec) {
  if (spec.n_elements == 0) throw Error(ErrorKind::kInvalidArgument, "n_elements must be > 0");
  if (spec.measured_passes == 0) {
    throw Error(ErrorKind::kInvalidArgument, "measured_passes must be >= 1");
  }
}

ExecConfig exec_config(const BenchSpec& spec) {
  ExecConfig cfg;
  cfg.tile_elems = spec.tile_elems;
  cfg.elems_per_lane = 8;
  cfg.lanes = spec.tile_elems / cfg.elems_per_lane;
  cfg.workers = spec.workers;
  if (spec.tile_elems % cfg.elems_per_lane != 0) {
    throw Error(ErrorKind::kInvalidArgument, "tile size must be a multiple of 8");
  }
  if (auto why = validate(cfg)) throw Error(ErrorKind::kInvalidArgument, *why);
  return cfg;
}

}  // namespace

std::vector<float> standard_normal(std::size_t n, std::uint64_t seed) {
  auto out = allocate<float>(n);
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(rng.uniform()));
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    out[i] = static_cast<float>(r * std::cos(theta));
    if (i + 1 < n) out[i + 1] = static_cast<float>(r * std::sin(theta));
  }
  return out;
}

std::uint64_t checksum(std::span<const float> values) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (float v : values) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) {
      h ^= (bits >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

BenchReport run_bench(const BenchSpec& spec, const QuantizedTensor& qt) {
  check_spec(spec);
  if (qt.n != spec.n_elements) {
    throw Error(ErrorKind::kInvalidArgument, "tensor size does not match bench spec");
  }
  const ExecConfig cfg = exec_config(spec);
  const Codebook& cb = canonical_nf4();
  auto out = allocate<float>(qt.n);

  BenchReport report;
  report.spec = spec;

  for (std::uint32_t i = 0; i < spec.warmup_passes; ++i) {
    dequantize_into(qt, spec.decoder, cfg, cb, std::span<float>(out));
  }
  if (spec.warmup_passes > 0) report.checksum = checksum(out);

  using Clock = std::chrono::steady_clock;
  for (std::uint32_t i = 0; i < spec.measured_passes; ++i) {
    const auto t0 = Clock::now();
    dequantize_into(qt, spec.decoder, cfg, cb, std::span<float>(out));
    const auto t1 = Clock::now();
    report.pass_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());

    const std::uint64_t sum = checksum(out);
    if (i == 0 && spec.warmup_passes == 0) report.checksum = sum;
    if (sum != report.checksum) {
      throw Error(ErrorKind::kInvalidTensor, "output checksum changed between passes");
    }
  }

  report.mean_seconds =
      std::accumulate(report.pass_seconds.begin(), report.pass_seconds.end(), 0.0) /
      static_cast<double>(report.pass_seconds.size());
  const double input_bytes = static_cast<double>(qt.packed.size() + 4 * qt.absmax.size());
  if (report.mean_seconds > 0.0) {
    report.elements_per_second = static_cast<double>(qt.n) / report.mean_seconds;
    report.input_bytes_per_second = input_bytes / report.mean_seconds;
  }
  return report;
}

BenchReport run_bench(const BenchSpec& spec) {
  check_spec(spec);
  exec_config(spec);
  QuantizedTensor qt;
  {
    const auto values = standard_normal(static_cast<std::size_t>(spec.n_elements), spec.seed);
    qt = quantize_blockwise(values, canonical_nf4());
  }
  return run_bench(spec, qt);
}

DecoderComparison compare(std::uint64_t n_elements, std::uint32_t workers, std::uint64_t seed,
                          std::uint32_t warmup_passes, std::uint32_t measured_passes) {
  BenchSpec spec;
  spec.n_elements = n_elements;
  spec.workers = workers;
  spec.seed = seed;
  spec.warmup_passes = warmup_passes;
  spec.measured_passes = measured_passes;
  check_spec(spec);
  exec_config(spec);

  QuantizedTensor qt;
  {
    const auto values = standard_normal(static_cast<std::size_t>(n_elements), seed);
    qt = quantize_blockwise(values, canonical_nf4());
  }

  DecoderComparison cmp;
  spec.decoder = DecoderKind::kTree;
  cmp.tree = run_bench(spec, qt);
  spec.decoder = DecoderKind::kDirectLut;
  cmp.lut = run_bench(spec, qt);
  if (cmp.tree.checksum != cmp.lut.checksum) {
    throw Error(ErrorKind::kInvalidTensor, "decoders disagree on the benchmark tensor");
  }
  cmp.speedup = cmp.tree.mean_seconds / cmp.lut.mean_seconds;
  return cmp;
}

double compare_decoders(std::uint64_t n_elements, std::uint32_t workers, std::uint64_t seed) {
  return compare(n_elements, workers, seed).speedup;
}

void write_csv(std::ostream& os, std::span<const BenchReport> reports) {
  std::size_t max_passes = 0;
  for (const auto& r : reports) max_passes = std::max(max_passes, r.pass_seconds.size());

  os << "n_elements,decoder,workers,tile_elems,warmup_passes,measured_passes,seed";
  for (std::size_t i = 0; i < max_passes; ++i) os << ",pass" << i << "_s";
  os << ",mean_s,elements_per_s,input_bytes_per_s,checksum\n";

  for (const auto& r : reports) {
    os << r.spec.n_elements << ',' << to_string(r.spec.decoder) << ',' << r.spec.workers << ','
       << r.spec.tile_elems << ',' << r.spec.warmup_passes << ',' << r.spec.measured_passes << ','
       << r.spec.seed;
    os << std::setprecision(9);
    for (std::size_t i = 0; i < max_passes; ++i) {
      os << ',';
      if (i < r.pass_seconds.size()) os << r.pass_seconds[i];
    }
    os << ',' << r.mean_seconds << ',' << r.elements_per_second << ','
       << r.input_bytes_per_second << ",0x" << std::hex << std::setw(16) << std::setfill('0')
       << r.checksum << std::dec << std::setfill(' ') << '\n';
  }
}

void write_svg_plot(std::ostream& os, std::span<const BenchReport> reports) {
  constexpr double kPanelW = 360, kPanelH = 240, kPad = 48, kBarGap = 12;
  const double width = 2 * kPanelW + 3 * kPad;
  const double height = kPanelH + 2 * kPad;

  auto label = [](const BenchReport& r) {
    std::ostringstream s;
    s << to_string(r.spec.decoder) << " w" << r.spec.workers;
    return s.str();
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  auto panel = [&](double x0, const char* title, auto metric, const char* unit) {
    double peak = 0;
    for (const auto& r : reports) peak = std::max(peak, metric(r));
    if (peak <= 0) peak = 1;
    const double y0 = kPad + kPanelH;
    os << "<text x=\"" << x0 + kPanelW / 2 << "\" y=\"" << kPad - 16
       << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 + kPanelW << "\" y2=\"" << y0
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << x0 << "\" y1=\"" << kPad << "\" x2=\"" << x0 << "\" y2=\"" << y0
       << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    const double n = static_cast<double>(std::max<std::size_t>(reports.size(), 1));
    const double bar_w = (kPanelW - kBarGap * (n + 1)) / n;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const auto& r = reports[i];
      const double v = metric(r);
      const double h = kPanelH * v / peak;
      const double x = x0 + kBarGap + static_cast<double>(i) * (bar_w + kBarGap);
      const char* fill = r.spec.decoder == DecoderKind::kTree ? "#b3b3b3" : "#4d9999";
      os << "<rect x=\"" << x << "\" y=\"" << y0 - h << "\" width=\"" << bar_w << "\" height=\""
         << h << "\" fill=\"" << fill << "\"/>\n";
      os << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << y0 + 14 << "\" text-anchor=\"middle\">"
         << label(r) << "</text>\n";
      os << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << y0 - h - 4
         << "\" text-anchor=\"middle\">" << std::setprecision(4) << v << "</text>\n";
    }
    os << "<text x=\"" << x0 + kPanelW / 2 << "\" y=\"" << y0 + 32
       << "\" text-anchor=\"middle\">" << unit << "</text>\n";
  };

  panel(kPad, "Mean dequantize latency", [](const BenchReport& r) { return r.mean_seconds * 1e3; },
        "ms");
  panel(2 * kPad + kPanelW, "Throughput",
        [](const BenchReport& r) { return r.elements_per_second / 1e9; }, "Gelem/s");
  os << "</svg>\n";
}

}  // namespace nf4::bench
