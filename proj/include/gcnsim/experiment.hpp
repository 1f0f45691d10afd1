#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "gcnsim/graph_io.hpp"
#include "gcnsim/memsim.hpp"
#include "gcnsim/schedule.hpp"

namespace gcnsim {

// --- sparsity sweep (traffic / modeled-time comparison across formats) -------

struct SweepConfig {
  u32 num_vertices = 10000;
  u32 degree = 10;
  u32 width = 256;
  u32 num_layers = 8;  // 1 projection + (num_layers - 1) residual layers
  u32 unit_width = 96;
  u32 line_bytes = 64;
  u64 cache_bytes = 1ull << 20;
  u32 cache_ways = 16;
  bool weighted = true;
  double input_sparsity = 0.99;  // dataset-style input activations
  std::vector<double> sparsity_grid = {0.005, 0.05, 0.125, 0.25, 0.375, 0.50,
                                       0.55,  0.60, 0.75,  0.85, 0.90,  0.95};
  u64 graph_seed = 20240901;
  u64 meta_seed = 777;
};

struct SweepRow {
  double sparsity = 0.0;
  FeatureFormat format = FeatureFormat::biecsr;
  u64 feat_read_bytes = 0;
  u64 topo_read_bytes = 0;
  u64 residual_bytes = 0;
  u64 weight_bytes = 0;
  u64 output_bytes = 0;
  u64 total_dram_bytes = 0;
  double cache_hit_rate = 0.0;
  u64 agg_macs = 0;
  u64 gemm_macs = 0;
  double est_time_s = 0.0;
  double time_vs_dense = 0.0;  // est_time / est_time(dense at same sparsity)
};

// Runs every format in SweepConfig's grid with identical per-layer sparsity
// metadata (paired comparison), a fresh cache per layer. Row order:
// sparsity-major; formats biecsr, dense, csr, coo.
std::vector<SweepRow> run_sparsity_sweep(const SweepConfig& cfg);

void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows);
// sparsity vs modeled-time ratio (format/dense) per format.
void write_time_ratio_csv(std::ostream& out, const std::vector<SweepRow>& rows);
// feature-read bytes per format at the grid point nearest 0.5.
void write_feature_traffic_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_summary(std::ostream& out, const std::vector<SweepRow>& rows,
                   const SweepConfig& cfg);

// Midpoint of the last swept bracket where `ratios` (aligned with ascending
// `xs`) passes from >= 1 to < 1 and stays below 1; nullopt when there is no
// such clean crossing.
std::optional<double> crossover_midpoint(const std::vector<double>& xs,
                                         const std::vector<double>& ratios);

// --- strip-interleaving (SAC) experiment -------------------------------------

struct SacConfig {
  u32 num_vertices = 4096;
  u32 draws_per_row = 32;
  u32 block_rows = 16;
  u32 strip_height = 32;
  u32 engines = 8;
  u32 width = 256;
  u32 unit_width = 96;
  u32 line_bytes = 64;
  u32 tile_rows = 256;
  double sparsity = 0.25;
  bool weighted = true;
  u64 graph_seed = 5;
  u64 meta_seed = 105;
  u32 cache_sets = 256;  // ways derived so capacity ~= half the working set
};

struct SacResult {
  u64 working_set_bytes = 0;  // max over row tiles: distinct sources x dense row footprint
  u64 cache_bytes = 0;
  u32 cache_ways = 0;
  double hit_ascending = 0.0;
  double hit_sac = 0.0;
  double time_ascending_s = 0.0;
  double time_sac_s = 0.0;
  u64 feat_ascending = 0;
  u64 feat_sac = 0;
  u64 dram_ascending = 0;
  u64 dram_sac = 0;
};

// Dense-capacity feature bytes of the distinct sources referenced by the
// worst row tile (the reuse window a tile must keep resident).
u64 tile_working_set_bytes(const Graph& g, u32 tile_rows, u32 width,
                           u32 unit_width, u32 line_bytes);

SacResult run_sac_experiment(const SacConfig& cfg);

// --- config file parsing (key=value lines, '#' comments) ---------------------

std::map<std::string, std::string> parse_kv_config(std::istream& in);
SweepConfig sweep_config_from_kv(const std::map<std::string, std::string>& kv);
SacConfig sac_config_from_kv(const std::map<std::string, std::string>& kv);

}  // namespace gcnsim
