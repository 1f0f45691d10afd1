#include "gcnsim/biecsr.hpp"

#include <bit>
#include <istream>
#include <ostream>

namespace gcnsim {

double index_overhead_ratio(u32 width, double sparsity) {
  if (width == 0) throw std::invalid_argument("width must be nonzero");
  if (!(sparsity >= 0.0) || sparsity >= 1.0) {
    throw std::invalid_argument("sparsity must lie in [0, 1)");
  }
  // One bitmap bit per element over 32 value bits per nonzero element.
  return 1.0 / (32.0 * (1.0 - sparsity));
}

BiecsrMatrix compress_matrix(const Matrix& m, BiecsrConfig cfg) {
  if (cfg.unit_width == 0 || cfg.line_bytes == 0) {
    throw std::invalid_argument("unit_width and line_bytes must be nonzero");
  }
  BiecsrMatrix out;
  out.num_rows = u32(m.rows);
  out.width = u32(m.cols);
  out.cfg = cfg;
  const u32 spr = out.spr();
  const u64 rsb = out.rsb();
  out.backing.assign(u64(out.num_rows) * spr * rsb, 0);
  out.slice_nnz.assign(u64(out.num_rows) * spr, 0);
  for (u32 v = 0; v < out.num_rows; ++v) {
    const float* src = m.row(v);
    for (u32 k = 0; k < spr; ++k) {
      const u32 w = slice_width(out.width, cfg.unit_width, k);
      out.slice_nnz[u64(v) * spr + k] = compress_slice(
          src + u64(k) * cfg.unit_width, w, cfg.unit_width, out.slice(v, k));
    }
  }
  return out;
}

Matrix decompress_matrix(const BiecsrMatrix& m) {
  Matrix out(m.num_rows, m.width);
  const u32 spr = m.spr();
  for (u32 v = 0; v < m.num_rows; ++v) {
    float* dst = out.row(v);
    for (u32 k = 0; k < spr; ++k) {
      const u32 w = slice_width(m.width, m.cfg.unit_width, k);
      decompress_slice(m.slice(v, k), w, m.cfg.unit_width,
                       dst + u64(k) * m.cfg.unit_width);
    }
  }
  return out;
}

// --- little-endian stream helpers -------------------------------------------

namespace {

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), std::streamsize(n));
}

void read_bytes(std::istream& in, void* p, std::size_t n) {
  in.read(static_cast<char*>(p), std::streamsize(n));
  if (std::size_t(in.gcount()) != n) throw std::runtime_error("truncated stream");
}

template <class T>
void write_le(std::ostream& out, T v) {
  u8 buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = u8(u64(v) >> (8 * i));
  write_bytes(out, buf, sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  u8 buf[sizeof(T)];
  read_bytes(in, buf, sizeof(T));
  u64 v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= u64(buf[i]) << (8 * i);
  return T(v);
}

void write_f32(std::ostream& out, float f) {
  write_le<u32>(out, std::bit_cast<u32>(f));
}

float read_f32(std::istream& in) { return std::bit_cast<float>(read_le<u32>(in)); }

void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4];
  read_bytes(in, got, 4);
  if (std::memcmp(got, magic, 4) != 0) throw std::runtime_error("bad magic");
}

}  // namespace

void save_matrix(std::ostream& out, const Matrix& m) {
  write_bytes(out, "SGF1", 4);
  write_le<u64>(out, m.rows);
  write_le<u64>(out, m.cols);
  for (float f : m.data) write_f32(out, f);
}

Matrix load_matrix(std::istream& in) {
  expect_magic(in, "SGF1");
  const u64 rows = read_le<u64>(in);
  const u64 cols = read_le<u64>(in);
  Matrix m(rows, cols);
  for (float& f : m.data) f = read_f32(in);
  return m;
}

void save_biecsr(std::ostream& out, const BiecsrMatrix& m) {
  write_bytes(out, "BIE1", 4);
  write_le<u64>(out, m.num_rows);
  write_le<u64>(out, m.width);
  write_le<u32>(out, m.cfg.unit_width);
  write_le<u32>(out, kElemBytes);
  write_le<u32>(out, m.cfg.line_bytes);
  write_bytes(out, m.backing.data(), m.backing.size());
  for (u16 n : m.slice_nnz) write_le<u16>(out, n);
}

BiecsrMatrix load_biecsr(std::istream& in) {
  expect_magic(in, "BIE1");
  BiecsrMatrix m;
  m.num_rows = u32(read_le<u64>(in));
  m.width = u32(read_le<u64>(in));
  m.cfg.unit_width = read_le<u32>(in);
  const u32 elem = read_le<u32>(in);
  if (elem != kElemBytes) throw std::runtime_error("unsupported element size");
  m.cfg.line_bytes = read_le<u32>(in);
  m.backing.resize(u64(m.num_rows) * m.spr() * m.rsb());
  read_bytes(in, m.backing.data(), m.backing.size());
  m.slice_nnz.resize(u64(m.num_rows) * m.spr());
  for (u16& n : m.slice_nnz) n = read_le<u16>(in);
  return m;
}

}  // namespace gcnsim
