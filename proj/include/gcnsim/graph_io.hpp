#pragma once

#include <iosfwd>
#include <string>

#include "gcnsim/types.hpp"

namespace gcnsim {

// Compressed-sparse-row adjacency. Column indices are ascending within each
// row; duplicate edges are merged by summing their weights.
struct Graph {
  u32 num_vertices = 0;
  std::vector<u64> row_ptr;    // size num_vertices + 1
  std::vector<u32> col_idx;    // size num_edges()
  std::vector<float> weights;  // size num_edges()

  u64 num_edges() const { return col_idx.size(); }
  u32 degree(u32 v) const { return u32(row_ptr[v + 1] - row_ptr[v]); }
};

struct EdgeInput {
  u32 src = 0;
  u32 dst = 0;
  float weight = 1.0f;
};

// Builds canonical CSR: sorts by (src, dst), merges duplicates by weight sum.
// Throws std::out_of_range if an endpoint is >= num_vertices.
Graph graph_from_edges(u32 num_vertices, std::vector<EdgeInput> edges);

// Text format: '#' starts a comment; the first data token is the vertex
// count; each following line is "src dst [weight]" (weight defaults to 1.0).
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);
void save_edge_list(std::ostream& out, const Graph& g);

// Deterministic synthetic generators.

// Every vertex gets exactly `degree` distinct non-self neighbors drawn
// uniformly; all edge weights are 1.0.
Graph gen_uniform_graph(u32 num_vertices, u32 degree, u64 seed);

// Community-structured graph used by the locality experiments. Rows are
// grouped into superstrips of strip_height*engines rows; a row at intra-strip
// offset j in superstrip g draws `draws_per_row` targets (duplicates merge)
// from the block of `block_rows` consecutive sources selected by (g, j), so
// rows that share an intra-strip offset share a neighbor block.
Graph gen_topic_block_graph(u32 num_vertices, u32 draws_per_row, u32 block_rows,
                            u32 strip_height, u32 engines, u64 seed);

}  // namespace gcnsim
