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

// ADTB: a minimal little-endian tensor container.
//
//   offset 0   "ADTB"
//   offset 4   u16 version (= 1)
//   offset 6   u8  dtype   (1=f32, 2=f64, 3=u8, 4=u16)
//   offset 7   u8  ndim    (1..4)
//   offset 8   ndim x u64 dims
//   then       row-major payload, little-endian elements

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "adbench/error.hpp"

namespace adbench {

enum class DType : std::uint8_t { kF32 = 1, kF64 = 2, kU8 = 3, kU16 = 4 };

inline std::size_t element_size(DType dtype) {
  switch (dtype) {
    case DType::kF32: return 4;
    case DType::kF64: return 8;
    case DType::kU8: return 1;
    case DType::kU16: return 2;
  }
  fail(ErrorCode::kUnknownDtype, "dtype code " + std::to_string(static_cast<int>(dtype)));
}

template <typename T>
constexpr DType dtype_of() {
  if constexpr (std::is_same_v<T, float>) return DType::kF32;
  else if constexpr (std::is_same_v<T, double>) return DType::kF64;
  else if constexpr (std::is_same_v<T, std::uint8_t>) return DType::kU8;
  else if constexpr (std::is_same_v<T, std::uint16_t>) return DType::kU16;
  else static_assert(sizeof(T) == 0, "unsupported ADTB element type");
}

inline constexpr std::array<char, 4> kAdtbMagic = {'A', 'D', 'T', 'B'};
inline constexpr std::uint16_t kAdtbVersion = 1;

/// Dense tensor with a type tag. The payload is kept as little-endian bytes so that
/// write/read round trips are bit-exact for every dtype, NaN payloads included.
class TensorBlob {
 public:
  TensorBlob() = default;
  TensorBlob(DType dtype, std::vector<std::uint64_t> dims, std::vector<std::byte> payload)
      : dtype_(dtype), dims_(std::move(dims)), payload_(std::move(payload)) {
    validate();
  }

  template <typename T>
  static TensorBlob from_values(std::vector<std::uint64_t> dims, std::span<const T> values) {
    std::vector<std::byte> bytes(values.size() * sizeof(T));
    for (std::size_t i = 0; i < values.size(); ++i) store_le(values[i], bytes.data() + i * sizeof(T));
    return TensorBlob(dtype_of<T>(), std::move(dims), std::move(bytes));
  }
  template <typename T>
  static TensorBlob from_values(std::vector<std::uint64_t> dims, const std::vector<T>& values) {
    return from_values<T>(std::move(dims), std::span<const T>(values));
  }

  DType dtype() const noexcept { return dtype_; }
  const std::vector<std::uint64_t>& dims() const noexcept { return dims_; }
  const std::vector<std::byte>& payload() const noexcept { return payload_; }

  std::uint64_t element_count() const {
    std::uint64_t n = 1;
    for (auto d : dims_) n *= d;
    return n;
  }

  template <typename T>
  std::vector<T> values() const {
    if (dtype_of<T>() != dtype_) fail(ErrorCode::kInvalidArgument, "requested element type does not match blob dtype");
    std::vector<T> out(payload_.size() / sizeof(T));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = load_le<T>(payload_.data() + i * sizeof(T));
    return out;
  }

  /// Any dtype widened to double.
  std::vector<double> as_doubles() const {
    switch (dtype_) {
      case DType::kF32: { auto v = values<float>(); return {v.begin(), v.end()}; }
      case DType::kF64: return values<double>();
      case DType::kU8: { auto v = values<std::uint8_t>(); return {v.begin(), v.end()}; }
      case DType::kU16: { auto v = values<std::uint16_t>(); return {v.begin(), v.end()}; }
    }
    return {};
  }

  friend bool operator==(const TensorBlob&, const TensorBlob&) = default;

 private:
  template <typename T>
  static void store_le(T value, std::byte* out) {
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    std::memcpy(out, raw.data(), sizeof(T));
  }
  template <typename T>
  static T load_le(const std::byte* in) {
    std::array<std::byte, sizeof(T)> raw;
    std::memcpy(raw.data(), in, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    T value;
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

  void validate() const {
    element_size(dtype_);
    if (dims_.empty() || dims_.size() > 4) {
      fail(ErrorCode::kShapeMismatch, "ADTB supports 1 to 4 dims, got " + std::to_string(dims_.size()));
    }
    if (payload_.size() != element_count() * element_size(dtype_)) {
      fail(ErrorCode::kShapeMismatch, "payload of " + std::to_string(payload_.size()) +
                                          " bytes does not match dims (" +
                                          std::to_string(element_count()) + " elements)");
    }
  }

  DType dtype_ = DType::kU8;
  std::vector<std::uint64_t> dims_;
  std::vector<std::byte> payload_;
};

namespace detail {

inline void put_u64_le(std::vector<std::byte>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64_le(const std::byte* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline std::vector<std::byte> read_all_bytes(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + source.string());
  std::vector<char> chars((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(chars.size());
  std::memcpy(bytes.data(), chars.data(), chars.size());
  return bytes;
}

inline void write_all_bytes(const std::filesystem::path& destination, std::span<const std::byte> bytes) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + destination.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for " + destination.string());
}

}  // namespace detail

inline std::vector<std::byte> encode_tensor_blob(const TensorBlob& blob) {
  std::vector<std::byte> out;
  out.reserve(8 + 8 * blob.dims().size() + blob.payload().size());
  for (char c : kAdtbMagic) out.push_back(static_cast<std::byte>(c));
  out.push_back(static_cast<std::byte>(kAdtbVersion & 0xFF));
  out.push_back(static_cast<std::byte>(kAdtbVersion >> 8));
  out.push_back(static_cast<std::byte>(blob.dtype()));
  out.push_back(static_cast<std::byte>(blob.dims().size()));
  for (auto d : blob.dims()) detail::put_u64_le(out, d);
  out.insert(out.end(), blob.payload().begin(), blob.payload().end());
  return out;
}

inline TensorBlob decode_tensor_blob(std::span<const std::byte> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kAdtbMagic.data(), 4) != 0) {
    fail(ErrorCode::kBadMagic, "not an ADTB stream");
  }
  if (bytes.size() < 8) fail(ErrorCode::kTruncated, "ADTB header is truncated");
  const auto version = static_cast<std::uint16_t>(static_cast<unsigned>(bytes[4]) |
                                                  (static_cast<unsigned>(bytes[5]) << 8));
  if (version != kAdtbVersion) fail(ErrorCode::kUnsupportedFormat, "ADTB version " + std::to_string(version));
  const auto code = static_cast<std::uint8_t>(bytes[6]);
  if (code < 1 || code > 4) fail(ErrorCode::kUnknownDtype, "dtype code " + std::to_string(code));
  const auto dtype = static_cast<DType>(code);
  const auto ndim = static_cast<std::size_t>(bytes[7]);
  if (ndim < 1 || ndim > 4) fail(ErrorCode::kShapeMismatch, "ADTB ndim " + std::to_string(ndim));
  const std::size_t header = 8 + 8 * ndim;
  if (bytes.size() < header) fail(ErrorCode::kTruncated, "ADTB dims are truncated");
  std::vector<std::uint64_t> dims(ndim);
  std::uint64_t count = 1;
  for (std::size_t i = 0; i < ndim; ++i) {
    dims[i] = detail::get_u64_le(bytes.data() + 8 + 8 * i);
    count *= dims[i];
  }
  const std::uint64_t expected = count * element_size(dtype);
  if (bytes.size() - header < expected) {
    fail(ErrorCode::kTruncated, "payload has " + std::to_string(bytes.size() - header) + " bytes, expected " +
                                    std::to_string(expected));
  }
  if (bytes.size() - header > expected) fail(ErrorCode::kMalformed, "trailing bytes after ADTB payload");
  std::vector<std::byte> payload(bytes.begin() + static_cast<std::ptrdiff_t>(header), bytes.end());
  return TensorBlob(dtype, std::move(dims), std::move(payload));
}

inline void write_tensor_blob(const TensorBlob& blob, const std::filesystem::path& destination) {
  const auto bytes = encode_tensor_blob(blob);
  detail::write_all_bytes(destination, bytes);
}

inline TensorBlob read_tensor_blob(const std::filesystem::path& source) {
  const auto bytes = detail::read_all_bytes(source);
  return decode_tensor_blob(bytes);
}

}  // namespace adbench
