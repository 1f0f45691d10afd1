#pragma once

#include <iosfwd>
#include <stdexcept>

#include "gcnsim/types.hpp"

namespace gcnsim {

// BiECSR: each fixed-width segment ("unit slice") of a feature row is stored
// in a reserved dense-capacity region as a nonzero-position bitmap followed by
// the packed nonzero values. The reserved footprint never shrinks, so slice
// addresses are computable without pointers and slices compress in place.

constexpr u32 kElemBytes = 4;

struct BiecsrConfig {
  u32 unit_width = 96;  // elements per slice
  u32 line_bytes = 64;  // alignment quantum for the reserved region
};

constexpr u64 bitmap_bytes(u32 unit_width) { return ceil_div(unit_width, 8); }

constexpr u64 reserved_slice_bytes(u32 unit_width, u32 line_bytes) {
  return align_up(bitmap_bytes(unit_width) + u64(unit_width) * kElemBytes,
                  line_bytes);
}

constexpr u32 slices_per_row(u32 width, u32 unit_width) {
  return u32(ceil_div(width, unit_width));
}

// Width of slice k of a row of `width` elements (the last slice may be
// shorter; positions past it are structural zeros).
constexpr u32 slice_width(u32 width, u32 unit_width, u32 k) {
  u64 start = u64(k) * unit_width;
  if (start >= width) return 0;
  u64 rest = width - start;
  return u32(rest < unit_width ? rest : unit_width);
}

// Memory lines touched when reading one compressed slice: the bitmap plus the
// packed values, starting at the (line-aligned) slice base. At least one line.
constexpr u64 slice_touched_lines(u32 nnz, u32 unit_width, u32 line_bytes) {
  u64 lines = ceil_div(bitmap_bytes(unit_width) + u64(nnz) * kElemBytes,
                       line_bytes);
  return lines ? lines : 1;
}

// Bitmap bits per stored nonzero bit of value data: 1 / (32 * (1 - sparsity)).
// Throws std::invalid_argument when sparsity == 1 (no nonzeros) or out of
// [0, 1), or when width is zero.
double index_overhead_ratio(u32 width, double sparsity);

// --- slice kernels -----------------------------------------------------------
// Lane is any 4-byte trivially-copyable value type whose zero is Lane{}.
// Exact zeros are dropped; for float, -0.0f compares equal to zero, so a
// round trip canonicalizes -0.0f to +0.0f.

template <class Lane>
u16 compress_slice(const Lane* src, u32 width, u32 unit_width, u8* dst) {
  static_assert(sizeof(Lane) == kElemBytes, "slice lanes are 4 bytes");
  const u64 bb = bitmap_bytes(unit_width);
  std::memset(dst, 0, bb);
  u16 nnz = 0;
  for (u32 j = 0; j < width; ++j) {
    if (!(src[j] == Lane{})) {
      dst[j / 8] = u8(dst[j / 8] | (1u << (j % 8)));
      std::memcpy(dst + bb + u64(nnz) * kElemBytes, &src[j], kElemBytes);
      ++nnz;
    }
  }
  return nnz;
}

template <class Lane>
void decompress_slice(const u8* src, u32 width, u32 unit_width, Lane* dst) {
  static_assert(sizeof(Lane) == kElemBytes, "slice lanes are 4 bytes");
  const u64 bb = bitmap_bytes(unit_width);
  u32 rank = 0;
  for (u32 j = 0; j < width; ++j) {
    if (src[j / 8] & (1u << (j % 8))) {
      std::memcpy(&dst[j], src + bb + u64(rank) * kElemBytes, kElemBytes);
      ++rank;
    } else {
      dst[j] = Lane{};
    }
  }
}

// --- whole-matrix container --------------------------------------------------

struct BiecsrMatrix {
  u32 num_rows = 0;
  u32 width = 0;
  BiecsrConfig cfg;
  std::vector<u8> backing;     // num_rows * spr() * rsb()
  std::vector<u16> slice_nnz;  // num_rows * spr()

  u32 spr() const { return slices_per_row(width, cfg.unit_width); }
  u64 rsb() const { return reserved_slice_bytes(cfg.unit_width, cfg.line_bytes); }
  u64 slice_offset(u32 v, u32 k) const { return (u64(v) * spr() + k) * rsb(); }
  const u8* slice(u32 v, u32 k) const { return backing.data() + slice_offset(v, k); }
  u8* slice(u32 v, u32 k) { return backing.data() + slice_offset(v, k); }
  u16 nnz(u32 v, u32 k) const { return slice_nnz[u64(v) * spr() + k]; }
  u32 row_nnz(u32 v) const {
    u32 total = 0;
    for (u32 k = 0; k < spr(); ++k) total += nnz(v, k);
    return total;
  }
};

BiecsrMatrix compress_matrix(const Matrix& m, BiecsrConfig cfg = {});
Matrix decompress_matrix(const BiecsrMatrix& m);

// Binary serialization (little-endian).
void save_biecsr(std::ostream& out, const BiecsrMatrix& m);  // magic "BIE1"
BiecsrMatrix load_biecsr(std::istream& in);
void save_matrix(std::ostream& out, const Matrix& m);  // magic "SGF1"
Matrix load_matrix(std::istream& in);

}  // namespace gcnsim
