#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gcnsim/biecsr.hpp"
#include "oracles.hpp"

using namespace gcnsim;

TEST_CASE("reserved region geometry") {
  CHECK(bitmap_bytes(96) == 12);
  CHECK(bitmap_bytes(1) == 1);
  CHECK(bitmap_bytes(8) == 1);
  CHECK(bitmap_bytes(9) == 2);
  // 12 bitmap bytes + 96 elements * 4 bytes = 396, aligned up to 64.
  CHECK(reserved_slice_bytes(96, 64) == 448);
  CHECK(reserved_slice_bytes(128, 64) == 576);
  CHECK(reserved_slice_bytes(96, 32) == 416);
  CHECK(slices_per_row(256, 96) == 3);
  CHECK(slices_per_row(96, 96) == 1);
  CHECK(slices_per_row(97, 96) == 2);
  CHECK(slice_width(256, 96, 0) == 96);
  CHECK(slice_width(256, 96, 1) == 96);
  CHECK(slice_width(256, 96, 2) == 64);
  CHECK(slice_width(96, 96, 0) == 96);
}

TEST_CASE("touched lines per compressed slice") {
  CHECK(slice_touched_lines(0, 96, 64) == 1);   // bitmap only
  CHECK(slice_touched_lines(13, 96, 64) == 1);  // 12 + 52 = 64, still one line
  CHECK(slice_touched_lines(14, 96, 64) == 2);
  CHECK(slice_touched_lines(50, 96, 64) == 4);  // 12 + 200 = 212
  CHECK(slice_touched_lines(96, 96, 64) == 7);  // 12 + 384 = 396
  // Degenerate geometry still touches the bitmap's line.
  CHECK(slice_touched_lines(0, 8, 64) == 1);
}

TEST_CASE("index overhead ratio") {
  CHECK(index_overhead_ratio(256, 0.5) == 0.0625);  // exactly 1/16
  CHECK(index_overhead_ratio(96, 0.5) == 0.0625);   // width-independent
  CHECK(index_overhead_ratio(256, 0.0) == 0.03125);
  CHECK(index_overhead_ratio(256, 0.75) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS((void)index_overhead_ratio(256, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)index_overhead_ratio(256, -0.1), std::invalid_argument);
  CHECK_THROWS_AS((void)index_overhead_ratio(256, 1.5), std::invalid_argument);
  CHECK_THROWS_AS((void)index_overhead_ratio(0, 0.5), std::invalid_argument);
}

TEST_CASE("bitmap layout is LSB-first") {
  float src[8] = {0.0f, 1.5f, -2.0f, 0.0f, 0.0f, 0.0f, 0.0f, 0.0f};
  u8 buf[1 + 8 * 4] = {};
  const u16 nnz = compress_slice(src, 8, 8, buf);
  CHECK(nnz == 2);
  CHECK(buf[0] == 0x06);  // bits 1 and 2
  float v0, v1;
  std::memcpy(&v0, buf + 1, 4);
  std::memcpy(&v1, buf + 5, 4);
  CHECK(v0 == 1.5f);
  CHECK(v1 == -2.0f);
}

TEST_CASE("slice roundtrip including boundary patterns") {
  const u32 cw = 96;
  std::vector<u8> buf(reserved_slice_bytes(cw, 64));
  std::vector<float> out(cw);

  SUBCASE("all zero") {
    std::vector<float> src(cw, 0.0f);
    CHECK(compress_slice(src.data(), cw, cw, buf.data()) == 0);
    decompress_slice(buf.data(), cw, cw, out.data());
    for (float v : out) {
      CHECK(v == 0.0f);
      CHECK(!std::signbit(v));
    }
  }
  SUBCASE("fully dense") {
    std::vector<float> src(cw);
    for (u32 j = 0; j < cw; ++j) src[j] = float(j) + 0.5f;
    CHECK(compress_slice(src.data(), cw, cw, buf.data()) == cw);
    decompress_slice(buf.data(), cw, cw, out.data());
    CHECK(std::memcmp(out.data(), src.data(), cw * 4) == 0);
  }
  SUBCASE("negative zero canonicalizes to positive zero") {
    std::vector<float> src(cw, 0.0f);
    src[3] = -0.0f;
    src[7] = -4.25f;
    CHECK(compress_slice(src.data(), cw, cw, buf.data()) == 1);  // only index 7
    decompress_slice(buf.data(), cw, cw, out.data());
    CHECK(out[3] == 0.0f);
    CHECK(!std::signbit(out[3]));
    CHECK(out[7] == -4.25f);
  }
  SUBCASE("short slice leaves its tail untouched conceptually") {
    // Width 64 slice within unit width 96: positions 64..95 do not exist.
    std::vector<float> src(64, 0.0f);
    src[0] = 9.0f;
    src[63] = -1.0f;
    CHECK(compress_slice(src.data(), 64, cw, buf.data()) == 2);
    std::vector<float> dec(64, 42.0f);
    decompress_slice(buf.data(), 64, cw, dec.data());
    CHECK(dec[0] == 9.0f);
    CHECK(dec[63] == -1.0f);
    for (u32 j = 1; j < 63; ++j) CHECK(dec[j] == 0.0f);
  }
}

TEST_CASE("matrix compress/decompress recovers the input") {
  std::mt19937_64 rng(1234);
  for (double s : {0.0, 0.3, 0.9, 1.0}) {
    const Matrix m = oracles::fuzz_matrix(17, 250, s, rng);
    const BiecsrMatrix packed = compress_matrix(m, {96, 64});
    CHECK(packed.spr() == 3);
    CHECK(packed.rsb() == 448);
    CHECK(packed.backing.size() == u64(17) * 3 * 448);
    const Matrix round = decompress_matrix(packed);
    CHECK(bitwise_equal(round, m));

    u64 total = 0;
    for (float v : m.data) total += v != 0.0f;
    u64 packed_total = 0;
    for (u32 v = 0; v < packed.num_rows; ++v) packed_total += packed.row_nnz(v);
    CHECK(packed_total == total);
  }
}

TEST_CASE("negative zeros in a matrix canonicalize on the roundtrip") {
  std::mt19937_64 rng(77);
  const Matrix m = oracles::fuzz_matrix(9, 100, 0.6, rng, /*plant_negative_zero=*/true);
  bool planted = false;
  for (float v : m.data) planted |= (v == 0.0f && std::signbit(v));
  REQUIRE(planted);
  const Matrix round = decompress_matrix(compress_matrix(m, {96, 64}));
  CHECK(!bitwise_equal(round, m));  // -0.0 bits are gone...
  CHECK(bitwise_equal(round, oracles::canonical_zeros(m)));  // ...as specified
}

TEST_CASE("alternate unit widths and line sizes") {
  std::mt19937_64 rng(5150);
  for (u32 cw : {8u, 32u, 96u, 128u}) {
    for (u32 line : {32u, 64u}) {
      const Matrix m = oracles::fuzz_matrix(5, 200, 0.5, rng);
      const BiecsrMatrix packed = compress_matrix(m, {cw, line});
      CHECK(packed.rsb() % line == 0);
      CHECK(bitwise_equal(decompress_matrix(packed), m));
    }
  }
}

TEST_CASE("dense matrix serialization") {
  std::mt19937_64 rng(31);
  const Matrix m = oracles::fuzz_matrix(7, 33, 0.4, rng);
  std::ostringstream out;
  save_matrix(out, m);
  const std::string bytes = out.str();
  CHECK(bytes.size() == 4 + 8 + 8 + m.data.size() * 4);
  CHECK(bytes.substr(0, 4) == "SGF1");

  std::istringstream in(bytes);
  CHECK(bitwise_equal(load_matrix(in), m));

  std::istringstream trunc(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS((void)load_matrix(trunc), std::runtime_error);
  std::istringstream bad("XXXX" + bytes.substr(4));
  CHECK_THROWS_AS((void)load_matrix(bad), std::runtime_error);
}

TEST_CASE("compressed matrix serialization") {
  std::mt19937_64 rng(32);
  const Matrix m = oracles::fuzz_matrix(11, 130, 0.7, rng);
  const BiecsrMatrix packed = compress_matrix(m, {96, 64});
  std::ostringstream out;
  save_biecsr(out, packed);
  const std::string bytes = out.str();
  CHECK(bytes.substr(0, 4) == "BIE1");
  CHECK(bytes.size() == 4 + 8 + 8 + 4 + 4 + 4 + packed.backing.size() +
                            packed.slice_nnz.size() * 2);

  std::istringstream in(bytes);
  const BiecsrMatrix loaded = load_biecsr(in);
  CHECK(loaded.num_rows == packed.num_rows);
  CHECK(loaded.width == packed.width);
  CHECK(loaded.cfg.unit_width == packed.cfg.unit_width);
  CHECK(loaded.cfg.line_bytes == packed.cfg.line_bytes);
  CHECK(loaded.backing == packed.backing);
  CHECK(loaded.slice_nnz == packed.slice_nnz);
  CHECK(bitwise_equal(decompress_matrix(loaded), m));

  std::istringstream trunc(bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS((void)load_biecsr(trunc), std::runtime_error);
}

TEST_CASE("compressed row nonzero counters match slice sums") {
  std::mt19937_64 rng(8);
  const Matrix m = oracles::fuzz_matrix(6, 256, 0.5, rng);
  const BiecsrMatrix packed = compress_matrix(m, {96, 64});
  for (u32 v = 0; v < packed.num_rows; ++v) {
    u32 expect = 0;
    for (u32 j = 0; j < 256; ++j) expect += m.at(v, j) != 0.0f;
    CHECK(packed.row_nnz(v) == expect);
    u32 via_slices = 0;
    for (u32 k = 0; k < packed.spr(); ++k) via_slices += packed.nnz(v, k);
    CHECK(via_slices == expect);
  }
}
