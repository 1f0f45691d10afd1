#pragma once

#include "gcnsim/types.hpp"

namespace gcnsim {

// Q16.16 fixed-point lane. Fits the 4-byte slice-kernel contract
// (compress_slice / decompress_slice are templated on the lane type), so
// compressed matrices can carry fixed-point payloads unchanged.
struct Q16 {
  i32 raw = 0;

  friend bool operator==(const Q16&, const Q16&) = default;
};

constexpr Q16 q16_from_int(i32 v) { return Q16{v << 16}; }
constexpr i32 q16_to_int(Q16 v) { return v.raw >> 16; }  // exact for integer-valued Q16
constexpr Q16 q16_add(Q16 a, Q16 b) { return Q16{a.raw + b.raw}; }
constexpr Q16 q16_mul(Q16 a, Q16 b) {
  return Q16{i32((i64(a.raw) * i64(b.raw)) >> 16)};
}
constexpr Q16 q16_relu(Q16 v) { return v.raw > 0 ? v : Q16{0}; }

static_assert(sizeof(Q16) == 4);

}  // namespace gcnsim
