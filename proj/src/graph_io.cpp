#include "gcnsim/graph_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gcnsim {

Graph graph_from_edges(u32 num_vertices, std::vector<EdgeInput> edges) {
  for (const EdgeInput& e : edges) {
    if (e.src >= num_vertices || e.dst >= num_vertices) {
      throw std::out_of_range("edge endpoint out of range");
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeInput& a, const EdgeInput& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });

  Graph g;
  g.num_vertices = num_vertices;
  g.row_ptr.assign(num_vertices + 1, 0);
  g.col_idx.reserve(edges.size());
  g.weights.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    float w = 0.0f;
    while (j < edges.size() && edges[j].src == edges[i].src &&
           edges[j].dst == edges[i].dst) {
      w += edges[j].weight;
      ++j;
    }
    g.col_idx.push_back(edges[i].dst);
    g.weights.push_back(w);
    g.row_ptr[edges[i].src + 1] += 1;
    i = j;
  }
  for (u32 v = 0; v < num_vertices; ++v) g.row_ptr[v + 1] += g.row_ptr[v];
  return g;
}

namespace {

// Strips a trailing comment and returns the significant part of the line.
std::string strip_comment(const std::string& line) {
  std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

Graph load_edge_list(std::istream& in) {
  bool have_count = false;
  u64 num_vertices = 0;
  std::vector<EdgeInput> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(strip_comment(line));
    if (!have_count) {
      if (ls >> num_vertices) {
        std::string extra;
        if (ls >> extra) {
          throw std::runtime_error("edge list line " + std::to_string(line_no) +
                                   ": vertex-count line has trailing tokens");
        }
        have_count = true;
      }
      continue;
    }
    u64 src = 0, dst = 0;
    if (!(ls >> src)) continue;  // blank or comment-only line
    if (!(ls >> dst)) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": expected 'src dst [weight]'");
    }
    double w = 1.0;
    ls >> w;  // optional; leaves 1.0 on absence
    if (src >= num_vertices || dst >= num_vertices) {
      throw std::runtime_error("edge list line " + std::to_string(line_no) +
                               ": endpoint out of range");
    }
    edges.push_back({u32(src), u32(dst), float(w)});
  }
  if (!have_count) throw std::runtime_error("edge list: missing vertex count");
  return graph_from_edges(u32(num_vertices), std::move(edges));
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_edge_list(in);
}

void save_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_vertices << "\n";
  for (u32 v = 0; v < g.num_vertices; ++v) {
    for (u64 e = g.row_ptr[v]; e < g.row_ptr[v + 1]; ++e) {
      out << v << " " << g.col_idx[e] << " " << g.weights[e] << "\n";
    }
  }
}

Graph gen_uniform_graph(u32 num_vertices, u32 degree, u64 seed) {
  if (num_vertices == 0) throw std::invalid_argument("need at least one vertex");
  if (degree >= num_vertices) {
    throw std::invalid_argument("degree must be below the vertex count");
  }
  std::mt19937_64 rng(seed);
  std::vector<EdgeInput> edges;
  edges.reserve(u64(num_vertices) * degree);
  std::vector<u32> picked;
  for (u32 v = 0; v < num_vertices; ++v) {
    picked.clear();
    while (picked.size() < degree) {
      u32 u = u32(rng() % num_vertices);
      if (u == v) continue;
      if (std::find(picked.begin(), picked.end(), u) != picked.end()) continue;
      picked.push_back(u);
    }
    for (u32 u : picked) edges.push_back({v, u, 1.0f});
  }
  return graph_from_edges(num_vertices, std::move(edges));
}

Graph gen_topic_block_graph(u32 num_vertices, u32 draws_per_row, u32 block_rows,
                            u32 strip_height, u32 engines, u64 seed) {
  if (num_vertices == 0) throw std::invalid_argument("need at least one vertex");
  if (block_rows == 0 || strip_height == 0 || engines == 0) {
    throw std::invalid_argument("block_rows, strip_height, engines must be nonzero");
  }
  std::mt19937_64 rng(seed);
  const u64 superstrip = u64(strip_height) * engines;
  std::vector<EdgeInput> edges;
  edges.reserve(u64(num_vertices) * draws_per_row);
  for (u32 r = 0; r < num_vertices; ++r) {
    u64 g = r / superstrip;
    u64 j = (r % superstrip) % strip_height;
    u64 base = ((g * strip_height + j) * block_rows) % num_vertices;
    for (u32 d = 0; d < draws_per_row; ++d) {
      u32 u = u32((base + rng() % block_rows) % num_vertices);
      edges.push_back({r, u, 1.0f});
    }
  }
  return graph_from_edges(num_vertices, std::move(edges));
}

}  // namespace gcnsim
