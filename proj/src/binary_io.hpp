#pragma once

// Little-endian scalar I/O shared by the dataset and projection formats.

#include "l1sc/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

namespace l1sc::detail {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) {
    throw Error(ErrorCode::SizeMismatch, std::string("truncated input while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes.begin(), bytes.end());
  }
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

/// Bulk f64 read into contiguous storage.
inline void get_le_doubles(std::istream& in, double* dst, std::size_t count, const char* what) {
  const auto bytes = static_cast<std::streamsize>(count * sizeof(double));
  if (!in.read(reinterpret_cast<char*>(dst), bytes)) {
    throw Error(ErrorCode::SizeMismatch, std::string("truncated input while reading ") + what);
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < count; ++i) {
      auto* p = reinterpret_cast<char*>(dst + i);
      std::reverse(p, p + sizeof(double));
    }
  }
}

inline void put_le_doubles(std::ostream& out, const double* src, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(src), static_cast<std::streamsize>(count * sizeof(double)));
  } else {
    for (std::size_t i = 0; i < count; ++i) put_le(out, src[i]);
  }
}

}  // namespace l1sc::detail
