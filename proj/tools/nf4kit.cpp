// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0
//
// nf4kit: quantize, dequantize, verify and benchmark NF4 tensors.
//
// Tensor files are raw little-endian float32 (or float16 with --f16) arrays
// with no header. Quantized tensors use the NF4K container. Data goes to
// files or stdout; diagnostics go to stderr.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nf4/bench.hpp"
#include "nf4/codebook.hpp"
#include "nf4/costmodel.hpp"
#include "nf4/dequant.hpp"
#include "nf4/error.hpp"
#include "nf4/fp16.hpp"
#include "nf4/quantize.hpp"
#include "nf4/storage.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nf4::Error(nf4::ErrorKind::kIo, "cannot open " + path);
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
  if (in.bad()) throw nf4::Error(nf4::ErrorKind::kIo, "read failed: " + path);
  return bytes;
}

void write_file(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw nf4::Error(nf4::ErrorKind::kIo, "cannot open " + path + " for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw nf4::Error(nf4::ErrorKind::kIo, "write failed: " + path);
}

// Raw float32 file to values, little-endian regardless of host order.
std::vector<float> decode_f32(const std::vector<std::uint8_t>& bytes, std::uint64_t count) {
  std::vector<float> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
  return values;
}

template <class T>
std::vector<std::uint8_t> encode_le(const std::vector<T>& values) {
  std::vector<std::uint8_t> out;
  out.reserve(values.size() * sizeof(T));
  for (const T& v : values) {
    std::uint64_t bits = 0;
    if constexpr (std::is_same_v<T, float>) {
      bits = std::bit_cast<std::uint32_t>(v);
    } else {
      bits = v.bits;
    }
    for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

nf4::ExecConfig make_config(std::uint32_t tile, std::uint32_t workers, bool f16) {
  nf4::ExecConfig cfg;
  cfg.elems_per_lane = 8;
  if (tile == 0 || tile % cfg.elems_per_lane != 0) {
    throw UsageError("--tile must be a positive multiple of 8");
  }
  cfg.tile_elems = tile;
  cfg.lanes = tile / cfg.elems_per_lane;
  cfg.workers = workers;
  cfg.output_precision = f16 ? nf4::OutputPrecision::kFloat16 : nf4::OutputPrecision::kFloat32;
  if (auto why = nf4::validate(cfg)) throw UsageError(*why);
  return cfg;
}

const nf4::Codebook& codebook_for(const nf4::QuantizedTensor& qt) {
  const auto& cb = nf4::canonical_nf4();
  if (qt.codebook_id != cb.id) {
    throw nf4::Error(nf4::ErrorKind::kCodebookMismatch, "unknown codebook '" + qt.codebook_id + "'");
  }
  return cb;
}

void cmd_codebook_dump() {
  const auto& cb = nf4::canonical_nf4();
  std::cout << std::setprecision(17);
  for (std::size_t i = 0; i < cb.values.size(); ++i) {
    std::cout << i << '\t' << static_cast<double>(cb.values[i]) << '\n';
  }
}

void cmd_quantize(const std::string& in, const std::string& out, std::int64_t count) {
  const auto bytes = read_file(in);
  std::uint64_t n = 0;
  if (count >= 0) {
    n = static_cast<std::uint64_t>(count);
    if (n * 4 > bytes.size()) {
      throw nf4::Error(nf4::ErrorKind::kTruncated,
                       "truncated: " + in + " holds fewer than " + std::to_string(n) + " floats");
    }
  } else {
    if (bytes.size() % 4 != 0) {
      throw nf4::Error(nf4::ErrorKind::kTruncated,
                       "truncated: size of " + in + " is not a multiple of 4");
    }
    n = bytes.size() / 4;
  }
  const auto qt = nf4::quantize_blockwise(decode_f32(bytes, n), nf4::canonical_nf4());
  const auto blob = nf4::storage::serialize(qt);
  write_file(out, blob.data(), blob.size());
}

void cmd_dequantize(const std::string& in, const std::string& out, const std::string& decoder,
                    std::uint32_t workers, std::uint32_t tile, bool f16) {
  const auto cfg = make_config(tile, workers, f16);
  const auto qt = nf4::storage::deserialize(read_file(in));
  const auto& cb = codebook_for(qt);
  const auto kind = nf4::parse_decoder(decoder);

  std::vector<std::uint8_t> blob;
  if (f16) {
    std::vector<nf4::Half> values(qt.n);
    nf4::dequantize_into(qt, kind, cfg, cb, std::span<nf4::Half>(values));
    blob = encode_le(values);
  } else {
    blob = encode_le(nf4::dequantize_blockwise(qt, kind, cfg, cb));
  }
  write_file(out, blob.data(), blob.size());
}

void cmd_verify(const std::string& path) {
  const auto qt = nf4::storage::deserialize(read_file(path));
  const auto& cb = codebook_for(qt);
  for (bool f16 : {false, true}) {
    const auto cfg = make_config(512, 1, f16);
    const auto tree = nf4::dequantize_blockwise(qt, nf4::DecoderKind::kTree, cfg, cb);
    const auto lut = nf4::dequantize_blockwise(qt, nf4::DecoderKind::kDirectLut, cfg, cb);
    if (nf4::bench::checksum(tree) != nf4::bench::checksum(lut) || tree != lut) {
      throw nf4::Error(nf4::ErrorKind::kCorrupt, "decoder mismatch on payload");
    }
  }
  std::cout << "ok n=" << qt.n << " blocks=" << qt.absmax.size() << " codebook=" << qt.codebook_id
            << " decoders=equal\n";
}

struct BenchArgs {
  std::uint64_t n = 1u << 24;
  std::string decoder = "both";
  std::uint32_t workers = 1;
  std::uint32_t passes = 3;
  std::uint32_t warmup = 1;
  std::uint64_t seed = 0;
  std::uint32_t tile = 512;
  std::string csv;
  std::string plot;
};

void cmd_bench(const BenchArgs& a) {
  std::vector<nf4::bench::BenchReport> reports;
  nf4::bench::BenchSpec spec;
  spec.n_elements = a.n;
  spec.workers = a.workers;
  spec.warmup_passes = a.warmup;
  spec.measured_passes = a.passes;
  spec.seed = a.seed;
  spec.tile_elems = a.tile;
  if (a.decoder == "both") {
    auto cmp = nf4::bench::compare(a.n, a.workers, a.seed, a.warmup, a.passes);
    reports.push_back(std::move(cmp.tree));
    reports.push_back(std::move(cmp.lut));
    std::cerr << "tree/lut speedup: " << std::fixed << std::setprecision(3) << cmp.speedup << "x\n";
  } else {
    spec.decoder = nf4::parse_decoder(a.decoder);
    reports.push_back(nf4::bench::run_bench(spec));
  }

  if (a.csv.empty()) {
    nf4::bench::write_csv(std::cout, reports);
  } else {
    std::ofstream out(a.csv, std::ios::trunc);
    if (!out) throw nf4::Error(nf4::ErrorKind::kIo, "cannot open " + a.csv + " for writing");
    nf4::bench::write_csv(out, reports);
  }
  if (!a.plot.empty()) {
    std::ofstream out(a.plot, std::ios::trunc);
    if (!out) throw nf4::Error(nf4::ErrorKind::kIo, "cannot open " + a.plot + " for writing");
    nf4::bench::write_svg_plot(out, reports);
  }
}

void cmd_model(double f, double s) {
  const auto r = nf4::model::evaluate();
  const double e2e = nf4::model::amdahl_projection(f, s);
  std::cout << std::fixed;
  std::cout << "lut_traffic_bytes_per_block\tbaseline=" << r.baseline_lut_bytes_per_block
            << "\toptimized=" << r.optimized_lut_bytes_per_block << "\tratio="
            << std::setprecision(0) << r.traffic_ratio << "x\n";
  std::cout << "index_instructions_per_weight\tbaseline=" << r.baseline_instrs
            << "\toptimized=" << r.optimized_instrs << "\treduction=" << std::setprecision(0)
            << r.instr_reduction * 100.0 << "%\n";
  std::cout << "shared_vs_global_latency\tlo=" << std::setprecision(1) << r.latency_ratio_lo
            << "x\thi=" << r.latency_ratio_hi << "x\n";
  std::cout << "amdahl_projection\tf=" << std::setprecision(3) << f << "\ts=" << s
            << "\tend_to_end=" << e2e << "x\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NF4 blockwise quantization toolkit"};
  app.set_version_flag("--version",
                       std::string("nf4kit ") + kToolVersion + " (NF4K container v" +
                           std::to_string(nf4::storage::kVersion) + ")");
  app.require_subcommand(1);

  auto* codebook = app.add_subcommand("codebook", "Inspect the NF4 code table");
  codebook->require_subcommand(1);
  codebook->add_subcommand("dump", "Print the 16 levels, one per line")
      ->callback(cmd_codebook_dump);

  std::string q_in, q_out;
  std::int64_t q_count = -1;
  auto* quantize = app.add_subcommand("quantize", "Quantize a raw float32 file to NF4K");
  quantize->add_option("input", q_in, "Raw little-endian float32 array")->required();
  quantize->add_option("output", q_out, "NF4K container")->required();
  quantize->add_option("--count", q_count, "Element count (default: file size / 4)")
      ->check(CLI::NonNegativeNumber);

  std::string d_in, d_out, d_decoder = "lut";
  std::uint32_t d_workers = 1, d_tile = 512;
  bool d_f16 = false;
  auto* dequantize = app.add_subcommand("dequantize", "Dequantize an NF4K container");
  dequantize->add_option("input", d_in, "NF4K container")->required();
  dequantize->add_option("output", d_out, "Raw little-endian output array")->required();
  dequantize->add_option("--decoder", d_decoder, "tree or lut")
      ->check(CLI::IsMember({"tree", "lut"}));
  dequantize->add_option("--workers", d_workers, "Worker threads")->check(CLI::PositiveNumber);
  dequantize->add_option("--tile", d_tile, "Elements per tile")->check(CLI::PositiveNumber);
  dequantize->add_flag("--f16", d_f16, "Write IEEE binary16 instead of float32");

  std::string v_in;
  auto* verify = app.add_subcommand("verify", "Check an NF4K file and decoder agreement");
  verify->add_option("input", v_in, "NF4K container")->required();

  BenchArgs b;
  auto* bench = app.add_subcommand("bench", "Time dequantization (warmup, then measured passes)");
  bench->add_option("--n", b.n, "Element count")->check(CLI::PositiveNumber);
  bench->add_option("--decoder", b.decoder, "tree, lut or both")
      ->check(CLI::IsMember({"tree", "lut", "both"}));
  bench->add_option("--workers", b.workers, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--passes", b.passes, "Measured passes")->check(CLI::PositiveNumber);
  bench->add_option("--warmup", b.warmup, "Untimed warmup passes");
  bench->add_option("--seed", b.seed, "PRNG seed");
  bench->add_option("--tile", b.tile, "Elements per tile")->check(CLI::PositiveNumber);
  bench->add_option("--csv", b.csv, "Write the CSV report here instead of stdout");
  bench->add_option("--plot", b.plot, "Write an SVG bar chart here");

  double m_f = 0.295, m_s = 2.19;
  auto* model = app.add_subcommand("model", "Print the analytic cost model");
  model->add_option("--f", m_f, "Fraction of end-to-end time spent dequantizing")
      ->check(CLI::Range(0.0, 1.0));
  model->add_option("--s", m_s, "Kernel speedup")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*quantize) cmd_quantize(q_in, q_out, q_count);
    if (*dequantize) cmd_dequantize(d_in, d_out, d_decoder, d_workers, d_tile, d_f16);
    if (*verify) cmd_verify(v_in);
    if (*bench) cmd_bench(b);
    if (*model) cmd_model(m_f, m_s);
  } catch (const UsageError& e) {
    std::cerr << "nf4kit: " << e.what() << '\n';
    return 1;
  } catch (const nf4::Error& e) {
    std::cerr << "nf4kit: " << e.what() << '\n';
    return e.kind() == nf4::ErrorKind::kInvalidArgument ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "nf4kit: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
