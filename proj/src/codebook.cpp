// Copyright 2026 The nf4kit Authors
// SPDX-License-Identifier: Apache-2.0

#include "nf4/codebook.hpp"

#include <algorithm>
#include <cmath>

#include "nf4/error.hpp"

namespace nf4 {

const Codebook& canonical_nf4() {
  static const Codebook cb{
      std::vector<float>(kNf4Values.begin(), kNf4Values.end()),
      kNf4CodebookId};
  return cb;
}

std::optional<std::string> validate(const Codebook& cb) {
  if (cb.values.size() != kNumCodes) return "wrong length";
  if (cb.id.empty() || cb.id.size() > 255) return "bad codebook id";
  for (float v : cb.values) {
    if (!std::isfinite(v)) return "non-finite entry";
  }
  for (std::size_t i = 1; i < cb.values.size(); ++i) {
    if (!(cb.values[i - 1] < cb.values[i])) return "not strictly increasing";
  }
  if (cb.values.front() != -1.0f) return "first entry is not -1";
  if (cb.values.back() != 1.0f) return "last entry is not +1";
  if (cb.values[kZeroCode] != 0.0f) return "entry 7 is not exactly zero";
  return std::nullopt;
}

double max_adjacent_gap(const Codebook& cb) {
  double gap = 0.0;
  for (std::size_t i = 1; i < cb.values.size(); ++i) {
    gap = std::max(gap, static_cast<double>(cb.values[i]) -
                            static_cast<double>(cb.values[i - 1]));
  }
  return gap;
}

std::array<float, kNumCodes> to_lut(const Codebook& cb) {
  if (auto why = validate(cb)) {
    throw Error(ErrorKind::kInvalidArgument, "invalid codebook: " + *why);
  }
  std::array<float, kNumCodes> lut{};
  std::copy(cb.values.begin(), cb.values.end(), lut.begin());
  return lut;
}

}  // namespace nf4
