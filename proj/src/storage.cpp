// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/storage.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "nf4/error.hpp"

namespace nf4::storage {

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class T>
T get_le(std::span<const std::uint8_t> bytes, std::size_t offset) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<T>(bytes[offset + i]) << (8 * i));
  }
  return v;
}

}  // namespace

std::uint64_t container_size(std::uint64_t n, std::size_t id_len) {
  return kFixedHeaderBytes + id_len + 4ull * num_blocks(n) + packed_size(n) + 4;
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  const std::uint8_t* p = bytes.data();
  std::size_t left = bytes.size();
  // zlib takes a uInt length.
  while (left > 0) {
    const uInt len = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = ::crc32(crc, p, len);
    p += len;
    left -= len;
  }
  return static_cast<std::uint32_t>(crc);
}

std::vector<std::uint8_t> serialize(const QuantizedTensor& qt) {
  if (auto why = validate(qt)) throw Error(ErrorKind::kInvalidTensor, "invalid tensor: " + *why);

  std::vector<std::uint8_t> out;
  out.reserve(container_size(qt.n, qt.codebook_id.size()));
  for (std::uint8_t c : kMagic) out.push_back(c);
  put_u16(out, kVersion);
  put_u16(out, qt.n % 2 == 1 ? kFlagOddPad : 0);
  put_u64(out, qt.n);
  put_u32(out, qt.block_size);
  out.push_back(static_cast<std::uint8_t>(qt.codebook_id.size()));
  out.insert(out.end(), qt.codebook_id.begin(), qt.codebook_id.end());
  for (float s : qt.absmax) put_u32(out, std::bit_cast<std::uint32_t>(s));
  out.insert(out.end(), qt.packed.begin(), qt.packed.end());
  put_u32(out, crc32(out));
  return out;
}

std::size_t write_container(const QuantizedTensor& qt, std::ostream& sink) {
  const auto bytes = serialize(qt);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!sink) throw Error(ErrorKind::kIo, "write failed");
  return bytes.size();
}

QuantizedTensor deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw Error(ErrorKind::kNotNf4k, "not an NF4K file");
  }
  if (bytes.size() < 6) throw Error(ErrorKind::kTruncated, "truncated");
  if (get_le<std::uint16_t>(bytes, 4) != kVersion) {
    throw Error(ErrorKind::kUnsupportedVersion, "unsupported version");
  }
  if (bytes.size() < kFixedHeaderBytes) throw Error(ErrorKind::kTruncated, "truncated");

  const auto flags = get_le<std::uint16_t>(bytes, 6);
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto block_size = get_le<std::uint32_t>(bytes, 16);
  const std::size_t id_len = bytes[20];

  const std::uint64_t expected = container_size(n, id_len);
  if (bytes.size() < expected) throw Error(ErrorKind::kTruncated, "truncated");
  if (bytes.size() > expected) throw Error(ErrorKind::kCorrupt, "corrupt: trailing bytes");

  const std::size_t body = bytes.size() - 4;
  if (crc32(bytes.first(body)) != get_le<std::uint32_t>(bytes, body)) {
    throw Error(ErrorKind::kCorrupt, "corrupt: CRC mismatch");
  }

  // Past this point the bytes are what the writer produced; remaining checks
  // reject well-formed files that no valid tensor could have produced.
  if (block_size != kBlockSize) throw Error(ErrorKind::kCorrupt, "corrupt: unsupported block size");
  if ((flags & ~kFlagOddPad) != 0 || ((flags & kFlagOddPad) != 0) != (n % 2 == 1)) {
    throw Error(ErrorKind::kCorrupt, "corrupt: flags inconsistent with element count");
  }

  QuantizedTensor qt;
  qt.n = n;
  qt.block_size = block_size;
  std::size_t off = kFixedHeaderBytes;
  qt.codebook_id.assign(reinterpret_cast<const char*>(bytes.data() + off), id_len);
  off += id_len;
  qt.absmax.resize(num_blocks(n));
  for (auto& s : qt.absmax) {
    s = std::bit_cast<float>(get_le<std::uint32_t>(bytes, off));
    off += 4;
  }
  qt.packed.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                   bytes.begin() + static_cast<std::ptrdiff_t>(off + packed_size(n)));

  if (auto why = validate(qt)) throw Error(ErrorKind::kCorrupt, "corrupt: " + *why);
  return qt;
}

QuantizedTensor read_container(std::istream& source) {
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(source),
                                  std::istreambuf_iterator<char>()};
  if (source.bad()) throw Error(ErrorKind::kIo, "read failed");
  return deserialize(bytes);
}

}  // namespace nf4::storage
