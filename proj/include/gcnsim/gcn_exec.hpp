#pragma once

#include "gcnsim/biecsr.hpp"
#include "gcnsim/graph_io.hpp"
#include "gcnsim/types.hpp"

namespace gcnsim {

// relu maps every non-positive input (including -0.0) to +0.0.
inline float relu(float x) { return x > 0.0f ? x : 0.0f; }

struct ExecOptions {
  bool weighted = true;    // false: neighbor features are summed unscaled
  BiecsrConfig format;     // compressed-path storage parameters
};

// Residual network over L weight matrices:
//   S^1     = X_in * W^0            (input projection; W^0 is n_in x n)
//   S^{l+1} = A(X^l) * W^l + S^l    for l = 1..L-1, with X^l = relu(S^l)
// where A(X) is the per-vertex weighted (or plain) sum of neighbor rows.
//
// Both paths accumulate every output element in an identical order, so their
// results are bit-identical:
//  - projection/combination: accumulator starts at the residual term (or +0.0
//    for the projection) and adds products for k ascending; skipping an
//    exactly-zero operand is bit-neutral in round-to-nearest float math,
//  - aggregation: neighbors are visited in ascending order.
struct NetworkResult {
  std::vector<Matrix> S;  // S[l] = pre-activation produced by layer l, l = 0..L-1
  std::vector<Matrix> X;  // X[l] = relu(S[l])
};

// S1 = Xin * W0 accumulating every k (dense baseline path).
Matrix project_dense(const Matrix& x_in, const Matrix& w0);
// Same result, walking only the nonzeros of each input row.
Matrix project_sparse(const Matrix& x_in, const Matrix& w0);

// Weighted neighbor-sum of dense feature rows, ascending neighbor order.
Matrix aggregate_dense(const Graph& g, const Matrix& x, bool weighted);
// Same result, gathering straight from compressed slices (bitmap walk).
Matrix aggregate_compressed(const Graph& g, const BiecsrMatrix& x, bool weighted);

// Out = A * W + S with the accumulator seeded from S and k ascending.
Matrix combine_residual(const Matrix& a, const Matrix& w, const Matrix& s);

// relu + compress in one pass (the compressed path never materializes X).
BiecsrMatrix compress_relu(const Matrix& s, BiecsrConfig cfg);

NetworkResult run_network_dense(const Graph& g, const Matrix& x_in,
                                const std::vector<Matrix>& weights,
                                const ExecOptions& opts);
NetworkResult run_network_compressed(const Graph& g, const Matrix& x_in,
                                     const std::vector<Matrix>& weights,
                                     const ExecOptions& opts);

// Effectual multiply-accumulates of one aggregation pass over the graph
// (one per stored nonzero per edge); matches the trace builder's accounting.
u64 count_aggregation_macs(const Graph& g, const BiecsrMatrix& x);

}  // namespace gcnsim
