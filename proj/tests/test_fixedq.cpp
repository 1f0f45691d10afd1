#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "gcnsim/biecsr.hpp"
#include "gcnsim/fixedq.hpp"
#include "oracles.hpp"

using namespace gcnsim;

TEST_CASE("fixed-point basics") {
  CHECK(q16_from_int(3).raw == 3 << 16);
  CHECK(q16_to_int(q16_from_int(-7)) == -7);
  CHECK(q16_add(q16_from_int(2), q16_from_int(5)) == q16_from_int(7));
  CHECK(q16_mul(q16_from_int(3), q16_from_int(-4)) == q16_from_int(-12));
  CHECK(q16_relu(q16_from_int(-2)) == Q16{0});
  CHECK(q16_relu(q16_from_int(2)) == q16_from_int(2));
  // Half times half is a quarter: fractional bits survive multiplication.
  const Q16 half{1 << 15};
  CHECK(q16_mul(half, half).raw == 1 << 14);
}

TEST_CASE("slice kernels carry fixed-point lanes") {
  std::mt19937_64 rng(1);
  std::vector<Q16> src(96);
  for (auto& v : src) {
    const int draw = int(rng() % 9) - 4;  // integers in [-4, 4], ~1/9 zero
    v = q16_from_int(draw);
  }
  std::vector<u8> buf(reserved_slice_bytes(96, 64));
  const u16 nnz = compress_slice(src.data(), 96, 96, buf.data());
  u16 expect = 0;
  for (const Q16& v : src) expect += !(v == Q16{});
  CHECK(nnz == expect);
  std::vector<Q16> out(96);
  decompress_slice(buf.data(), 96, 96, out.data());
  CHECK(out == src);
}

// A little integer-valued network evaluated twice: float lanes through the
// library layers vs. fixed-point lanes through compressed slices. Integer
// values below 2^15 are exact in both arithmetics, so the results must agree
// exactly.
TEST_CASE("fixed-point network matches the float network on integer data") {
  std::mt19937_64 rng(7);
  const u32 V = 10, n = 24;
  const Graph g = gen_uniform_graph(V, 3, 5);

  auto int_matrix = [&](u32 rows, u32 cols, int lo, int hi, double zero_p) {
    Matrix m(rows, cols);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (float& x : m.data) {
      x = unit(rng) < zero_p ? 0.0f : float(int(rng() % u64(hi - lo + 1)) + lo);
    }
    return m;
  };
  const Matrix x0 = int_matrix(V, n, -3, 3, 0.5);
  const Matrix w = int_matrix(n, n, -2, 2, 0.6);

  // Float path: one aggregation + combination step against zero residuals.
  const Matrix agg_f = aggregate_dense(g, x0, /*weighted=*/false);
  const Matrix out_f = combine_residual(agg_f, w, Matrix(V, n));

  // Fixed path: compress X as Q16 slices, gather through the bitmaps,
  // combine with integer Q16 arithmetic.
  std::vector<std::vector<Q16>> xq(V, std::vector<Q16>(n));
  for (u32 v = 0; v < V; ++v) {
    for (u32 j = 0; j < n; ++j) xq[v][j] = q16_from_int(i32(x0.at(v, j)));
  }
  const u64 rsb = reserved_slice_bytes(n, 64);
  std::vector<u8> packed(V * rsb);
  for (u32 v = 0; v < V; ++v) {
    compress_slice(xq[v].data(), n, n, packed.data() + v * rsb);
  }
  std::vector<std::vector<Q16>> agg_q(V, std::vector<Q16>(n));
  std::vector<Q16> row(n);
  for (u32 v = 0; v < V; ++v) {
    for (u64 e = g.row_ptr[v]; e < g.row_ptr[v + 1]; ++e) {
      decompress_slice(packed.data() + g.col_idx[e] * rsb, n, n, row.data());
      for (u32 j = 0; j < n; ++j) agg_q[v][j] = q16_add(agg_q[v][j], row[j]);
    }
  }
  for (u32 v = 0; v < V; ++v) {
    for (u32 j = 0; j < n; ++j) {
      Q16 acc{0};
      for (u32 k = 0; k < n; ++k) {
        acc = q16_add(acc, q16_mul(agg_q[v][k], q16_from_int(i32(w.at(k, j)))));
      }
      CHECK(q16_to_int(acc) == i32(out_f.at(v, j)));
      CHECK(q16_relu(acc).raw == i32(oracles::ref_relu(float(q16_to_int(acc)))) << 16);
    }
  }
}
