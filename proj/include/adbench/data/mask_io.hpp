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

#include <cctype>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adbench/data/tensor_blob.hpp"
#include "adbench/data/types.hpp"
#include "adbench/error.hpp"

namespace adbench {

namespace detail {

// Parses one unsigned header token of a binary PGM, skipping whitespace and comments.
inline std::size_t pgm_header_number(std::span<const std::byte> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = static_cast<char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && static_cast<char>(bytes[pos]) != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  std::size_t value = 0;
  std::size_t digits = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(static_cast<char>(bytes[pos])))) {
    value = value * 10 + static_cast<std::size_t>(static_cast<char>(bytes[pos]) - '0');
    ++pos;
    ++digits;
  }
  if (digits == 0) fail(ErrorCode::kMalformed, "malformed PGM header");
  return value;
}

inline BinaryMask decode_pgm_mask(std::span<const std::byte> bytes) {
  std::size_t pos = 2;
  const std::size_t width = pgm_header_number(bytes, pos);
  const std::size_t height = pgm_header_number(bytes, pos);
  const std::size_t maxval = pgm_header_number(bytes, pos);
  if (maxval != 255) fail(ErrorCode::kUnsupportedFormat, "only PGM maxval 255 is supported, got " + std::to_string(maxval));
  if (width == 0 || height == 0) fail(ErrorCode::kShapeMismatch, "zero-area mask");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(static_cast<char>(bytes[pos])))) {
    fail(ErrorCode::kMalformed, "malformed PGM header");
  }
  ++pos;
  if (bytes.size() - pos < width * height) fail(ErrorCode::kTruncated, "PGM raster is truncated");
  std::vector<std::uint8_t> labels(width * height);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = bytes[pos + i] != std::byte{0} ? 1 : 0;
  return BinaryMask(height, width, std::move(labels));
}

inline BinaryMask decode_adtb_mask(std::span<const std::byte> bytes) {
  const TensorBlob blob = decode_tensor_blob(bytes);
  if (blob.dtype() != DType::kU8 || blob.dims().size() != 2) {
    fail(ErrorCode::kUnsupportedFormat, "ADTB masks must be u8 with dims [H, W]");
  }
  const auto height = static_cast<std::size_t>(blob.dims()[0]);
  const auto width = static_cast<std::size_t>(blob.dims()[1]);
  if (height == 0 || width == 0) fail(ErrorCode::kShapeMismatch, "zero-area mask");
  return BinaryMask(height, width, blob.values<std::uint8_t>());
}

}  // namespace detail

/// Decodes a mask from either a binary P5 PGM (maxval 255) or an ADTB u8 [H, W] blob.
inline BinaryMask decode_mask(std::span<const std::byte> bytes) {
  if (bytes.size() >= 2 && static_cast<char>(bytes[0]) == 'P' && static_cast<char>(bytes[1]) == '5') {
    return detail::decode_pgm_mask(bytes);
  }
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kAdtbMagic.data(), 4) == 0) {
    return detail::decode_adtb_mask(bytes);
  }
  fail(ErrorCode::kUnsupportedFormat, "mask is neither P5 PGM nor ADTB");
}

inline BinaryMask read_mask(const std::filesystem::path& source) {
  const auto bytes = detail::read_all_bytes(source);
  try {
    return decode_mask(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), source.string() + ": " + e.what());
  }
}

inline std::vector<std::byte> encode_pgm(const BinaryMask& mask) {
  const std::string header =
      "P5\n" + std::to_string(mask.width()) + " " + std::to_string(mask.height()) + "\n255\n";
  std::vector<std::byte> out(header.size() + mask.size());
  std::memcpy(out.data(), header.data(), header.size());
  for (std::size_t i = 0; i < mask.size(); ++i) out[header.size() + i] = mask[i] ? std::byte{255} : std::byte{0};
  return out;
}

/// Writes 255 for anomalous pixels and 0 elsewhere.
inline void write_pgm_mask(const BinaryMask& mask, const std::filesystem::path& destination) {
  detail::write_all_bytes(destination, encode_pgm(mask));
}

inline void write_adtb_mask(const BinaryMask& mask, const std::filesystem::path& destination) {
  write_tensor_blob(TensorBlob::from_values<std::uint8_t>({mask.height(), mask.width()}, mask.labels()), destination);
}

/// Score maps are ADTB f32/f64 blobs of dims [H, W]; leading unit dims are squeezed.
inline ScoreMap read_score_map(const std::filesystem::path& source) {
  TensorBlob blob;
  try {
    blob = read_tensor_blob(source);
  } catch (const Error& e) {
    throw Error(e.code(), source.string() + ": " + e.what());
  }
  if (blob.dtype() != DType::kF32 && blob.dtype() != DType::kF64) {
    fail(ErrorCode::kUnsupportedFormat, source.string() + ": score maps must be f32 or f64");
  }
  const auto& dims = blob.dims();
  for (std::size_t i = 0; i + 2 < dims.size(); ++i) {
    if (dims[i] != 1) fail(ErrorCode::kUnsupportedFormat, source.string() + ": multi-channel score maps are not supported");
  }
  if (dims.size() < 2) fail(ErrorCode::kShapeMismatch, source.string() + ": score map needs dims [H, W]");
  const auto height = static_cast<std::size_t>(dims[dims.size() - 2]);
  const auto width = static_cast<std::size_t>(dims[dims.size() - 1]);
  return ScoreMap(height, width, blob.as_doubles());
}

inline void write_score_map(const ScoreMap& map, const std::filesystem::path& destination, DType dtype = DType::kF32) {
  if (dtype == DType::kF64) {
    write_tensor_blob(TensorBlob::from_values<double>({map.height(), map.width()}, map.scores()), destination);
  } else if (dtype == DType::kF32) {
    std::vector<float> narrow(map.scores().begin(), map.scores().end());
    write_tensor_blob(TensorBlob::from_values<float>({map.height(), map.width()}, narrow), destination);
  } else {
    fail(ErrorCode::kInvalidArgument, "score maps are written as f32 or f64");
  }
}

}  // namespace adbench
