#pragma once

#include <iosfwd>
#include <random>
#include <string_view>

#include "gcnsim/biecsr.hpp"
#include "gcnsim/graph_io.hpp"
#include "gcnsim/types.hpp"

namespace gcnsim {

// --- address-trace events ----------------------------------------------------

enum class TraceKind : u8 {
  topo_read = 0,       // row pointer / column index / edge weight (allocating)
  feat_read = 1,       // input feature data in the active format (allocating)
  residual_read = 2,   // streamed S read (bypasses the cache)
  residual_write = 3,  // streamed S write (bypass + invalidate)
  weight_read = 4,     // streamed weight-matrix read (bypass)
  output_write = 5,    // next layer's features (bypass + invalidate)
};

constexpr bool trace_kind_writes(TraceKind k) {
  return k == TraceKind::residual_write || k == TraceKind::output_write;
}
constexpr bool trace_kind_allocates(TraceKind k) {
  return k == TraceKind::topo_read || k == TraceKind::feat_read;
}

struct TraceEvent {
  u64 addr = 0;
  u32 bytes = 0;
  TraceKind kind = TraceKind::topo_read;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

void save_trace(std::ostream& out, const std::vector<TraceEvent>& events);  // magic "TRC1"
std::vector<TraceEvent> load_trace(std::istream& in);

// --- processing order --------------------------------------------------------

// Strip-interleaved row order: rows form strips of strip_height; strip s
// belongs to engine (s mod engines); each engine walks its strips in
// ascending order; one row is taken from every still-active engine per round.
// engines == 1 yields the identity order.
std::vector<u32> sac_row_order(u32 rows, u32 strip_height, u32 engines);

// --- feature formats under comparison ---------------------------------------

enum class FeatureFormat : u8 { biecsr = 0, dense = 1, csr = 2, coo = 3 };

const char* format_name(FeatureFormat f);
FeatureFormat parse_format(std::string_view name);  // throws on unknown

// --- per-layer activation metadata ------------------------------------------
// Traffic depends only on per-slice / per-row nonzero counts, not on values.

struct LayerMeta {
  u32 num_rows = 0;
  u32 width = 0;
  u32 unit_width = 96;
  std::vector<u16> slice_nnz;  // num_rows * spr()
  std::vector<u32> row_nnz;    // num_rows

  u32 spr() const { return slices_per_row(width, unit_width); }
  u64 total_nnz() const;
};

LayerMeta meta_from_matrix(const Matrix& m, u32 unit_width);
LayerMeta meta_from_biecsr(const BiecsrMatrix& m);
// Per-element Bernoulli draw (element is zero with probability `sparsity`),
// rows outermost, slices then elements in order.
LayerMeta gen_random_meta(u32 rows, u32 width, u32 unit_width, double sparsity,
                          std::mt19937_64& rng);

// --- trace construction ------------------------------------------------------

struct TraceOptions {
  FeatureFormat format = FeatureFormat::biecsr;
  u32 line_bytes = 64;
  bool weighted = true;
  bool sac = false;       // strip-interleaved row order within each row tile
  u32 strip_height = 32;
  u32 engines = 8;
  u32 tile_rows = 0;      // 0 = one tile spanning all rows
  u32 tile_sources = 0;   // 0 = one pass spanning all sources
};

struct LayerTrace {
  std::vector<TraceEvent> events;
  u64 agg_macs = 0;   // one per stored nonzero per edge (projection: per input nonzero per output column)
  u64 gemm_macs = 0;  // dense combination, never skips
};

// One residual layer: gather neighbor features of every destination row
// (topology + format-specific feature reads), then per row tile the streamed
// combination traffic (weights, S read/write, output rows in the same format).
LayerTrace build_residual_layer_trace(const Graph& g, const LayerMeta& input,
                                      const LayerMeta& output,
                                      const TraceOptions& opts);

// Input projection: the input matrix is read in compact sparse-row form
// (identical events whatever `opts.format` says), the weight matrix is
// streamed once, and S / output rows are written as in a residual layer.
LayerTrace build_projection_trace(const LayerMeta& input, const LayerMeta& output,
                                  const TraceOptions& opts);

}  // namespace gcnsim
