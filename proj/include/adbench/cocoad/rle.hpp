// Copyright 2026 The adbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench::coco {

/// Run lengths over the column-major pixel order, alternating 0-runs and
/// 1-runs and always starting with a (possibly empty) 0-run.
struct RunLengths {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint32_t> counts;

  friend bool operator==(const RunLengths&, const RunLengths&) = default;
};

inline BinaryMask decode_rle(const RunLengths& rle) {
  std::uint64_t total = 0;
  for (auto c : rle.counts) total += c;
  const std::uint64_t area = static_cast<std::uint64_t>(rle.height) * rle.width;
  if (total != area) {
    fail(ErrorCode::kMalformed, "RLE counts sum to " + std::to_string(total) + " but the mask has " +
                                    std::to_string(area) + " pixels");
  }
  BinaryMask mask(rle.height, rle.width);
  std::size_t pos = 0;
  bool value = false;
  for (auto run : rle.counts) {
    if (value) {
      for (std::size_t k = pos; k < pos + run; ++k) mask.set(k % rle.height, k / rle.height, true);
    }
    pos += run;
    value = !value;
  }
  return mask;
}

inline RunLengths encode_rle(const BinaryMask& mask) {
  RunLengths rle{mask.height(), mask.width(), {}};
  bool value = false;
  std::uint32_t run = 0;
  for (std::size_t c = 0; c < mask.width(); ++c) {
    for (std::size_t r = 0; r < mask.height(); ++r) {
      if (mask(r, c) != value) {
        rle.counts.push_back(run);
        run = 0;
        value = !value;
      }
      ++run;
    }
  }
  rle.counts.push_back(run);
  return rle;
}

/// COCO's compact string form: each count is a 5-bit-chunked signed varint
/// offset by '0'; from the fourth count on it is stored as a delta against the
/// count two places earlier.
inline std::vector<std::uint32_t> decompress_counts(std::string_view text) {
  std::vector<std::uint32_t> counts;
  std::vector<std::int64_t> raw;
  std::size_t p = 0;
  while (p < text.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= text.size()) fail(ErrorCode::kMalformed, "compressed RLE ends inside a value");
      const int c = static_cast<unsigned char>(text[p]) - 48;
      if (c < 0 || c >= 64) fail(ErrorCode::kMalformed, "compressed RLE has an invalid character");
      if (k >= 12) fail(ErrorCode::kMalformed, "compressed RLE value is too long");
      x |= static_cast<std::int64_t>(c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= static_cast<std::int64_t>(-1) * (std::int64_t{1} << (5 * k));
    }
    if (raw.size() > 2) x += raw[raw.size() - 2];
    if (x < 0 || x > 0xFFFFFFFFll) fail(ErrorCode::kMalformed, "compressed RLE decodes to an out-of-range count");
    raw.push_back(x);
  }
  counts.assign(raw.begin(), raw.end());
  return counts;
}

inline std::string compress_counts(const std::vector<std::uint32_t>& counts) {
  std::string out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::int64_t x = counts[i];
    if (i > 2) x -= static_cast<std::int64_t>(counts[i - 2]);
    bool more = true;
    while (more) {
      std::int64_t c = x & 0x1f;
      x >>= 5;
      more = (c & 0x10) ? x != -1 : x != 0;
      if (more) c |= 0x20;
      out.push_back(static_cast<char>(c + 48));
    }
  }
  return out;
}

}  // namespace adbench::coco
