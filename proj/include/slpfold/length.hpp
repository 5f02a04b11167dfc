#pragma once

#include <cstdint>
#include <limits>

#include "error.hpp"

namespace slpfold {

// Word lengths and positions. Words up to 2^63 letters are supported; the
// arithmetic helpers below throw instead of wrapping.
using Length = std::uint64_t;

inline constexpr Length kMaxLength = Length{1} << 63;

inline Length add_len(Length a, Length b) {
  if (a > kMaxLength - b) throw RangeError("word length overflow (limit 2^63)");
  return a + b;
}

inline Length mul_len(Length a, Length b) {
  if (a != 0 && b > kMaxLength / a) throw RangeError("word length overflow (limit 2^63)");
  return a * b;
}

}  // namespace slpfold
