#include "gcnsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace gcnsim {

namespace {

constexpr FeatureFormat kFormats[] = {FeatureFormat::biecsr, FeatureFormat::dense,
                                      FeatureFormat::csr, FeatureFormat::coo};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

struct RunTotals {
  TrafficCounters ctr;
  double est_time = 0.0;
};

// One full network pass: projection + (num_layers - 1) residual layers, each
// with its own address space and a cold cache.
RunTotals run_network_trace(const Graph& g, const LayerMeta& input_meta,
                            const std::vector<LayerMeta>& act_meta,
                            const TraceOptions& topts, const CacheConfig& ccfg) {
  RunTotals totals;
  {
    LayerTrace t = build_projection_trace(input_meta, act_meta.front(), topts);
    SetAssocLru cache(ccfg);
    run_trace(cache, totals.ctr, t.events);
    totals.ctr.agg_macs += t.agg_macs;
    totals.ctr.gemm_macs += t.gemm_macs;
  }
  for (std::size_t l = 0; l + 1 < act_meta.size(); ++l) {
    LayerTrace t = build_residual_layer_trace(g, act_meta[l], act_meta[l + 1], topts);
    SetAssocLru cache(ccfg);
    run_trace(cache, totals.ctr, t.events);
    totals.ctr.agg_macs += t.agg_macs;
    totals.ctr.gemm_macs += t.gemm_macs;
  }
  totals.est_time = estimate_time_seconds(totals.ctr.total_dram_bytes(),
                                          totals.ctr.agg_macs, totals.ctr.gemm_macs);
  return totals;
}

SweepRow row_from_totals(double sparsity, FeatureFormat format, const RunTotals& t) {
  SweepRow r;
  r.sparsity = sparsity;
  r.format = format;
  r.feat_read_bytes = t.ctr.of(TrafficClass::feature).dram_bytes;
  r.topo_read_bytes = t.ctr.of(TrafficClass::topology).dram_bytes;
  r.residual_bytes = t.ctr.of(TrafficClass::residual).dram_bytes;
  r.weight_bytes = t.ctr.of(TrafficClass::weight).dram_bytes;
  r.output_bytes = t.ctr.of(TrafficClass::output).dram_bytes;
  r.total_dram_bytes = t.ctr.total_dram_bytes();
  r.cache_hit_rate = t.ctr.cache_hit_rate();
  r.agg_macs = t.ctr.agg_macs;
  r.gemm_macs = t.ctr.gemm_macs;
  r.est_time_s = t.est_time;
  return r;
}

}  // namespace

std::vector<SweepRow> run_sparsity_sweep(const SweepConfig& cfg) {
  if (cfg.num_layers < 1) throw std::invalid_argument("need at least one layer");
  const Graph g = gen_uniform_graph(cfg.num_vertices, cfg.degree, cfg.graph_seed);
  const CacheConfig ccfg{cfg.cache_bytes, cfg.cache_ways, cfg.line_bytes};
  SetAssocLru validate(ccfg);  // fail fast on a bad geometry
  (void)validate;

  std::vector<SweepRow> rows;
  rows.reserve(cfg.sparsity_grid.size() * 4);
  for (std::size_t idx = 0; idx < cfg.sparsity_grid.size(); ++idx) {
    const double s = cfg.sparsity_grid[idx];
    // Paired comparison: every format sees the same activation metadata.
    std::mt19937_64 rng(cfg.meta_seed + 1000003ull * idx);
    const LayerMeta input_meta = gen_random_meta(
        cfg.num_vertices, cfg.width, cfg.unit_width, cfg.input_sparsity, rng);
    std::vector<LayerMeta> act_meta;
    act_meta.reserve(cfg.num_layers);
    for (u32 l = 0; l < cfg.num_layers; ++l) {
      act_meta.push_back(
          gen_random_meta(cfg.num_vertices, cfg.width, cfg.unit_width, s, rng));
    }

    SweepRow per_fmt[4];
    double dense_time = 0.0;
    for (FeatureFormat f : kFormats) {
      TraceOptions topts;
      topts.format = f;
      topts.line_bytes = cfg.line_bytes;
      topts.weighted = cfg.weighted;
      const RunTotals totals = run_network_trace(g, input_meta, act_meta, topts, ccfg);
      per_fmt[u32(f)] = row_from_totals(s, f, totals);
      if (f == FeatureFormat::dense) dense_time = totals.est_time;
    }
    for (FeatureFormat f : kFormats) {
      per_fmt[u32(f)].time_vs_dense = per_fmt[u32(f)].est_time_s / dense_time;
      rows.push_back(per_fmt[u32(f)]);
    }
  }
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sparsity,format,feat_read_bytes,topo_read_bytes,residual_bytes,"
         "weight_bytes,output_bytes,total_dram_bytes,cache_hit_rate,agg_macs,"
         "gemm_macs,est_time_s,time_vs_dense\n";
  for (const SweepRow& r : rows) {
    out << fmt_double(r.sparsity) << ',' << format_name(r.format) << ','
        << r.feat_read_bytes << ',' << r.topo_read_bytes << ',' << r.residual_bytes
        << ',' << r.weight_bytes << ',' << r.output_bytes << ',' << r.total_dram_bytes
        << ',' << fmt_double(r.cache_hit_rate) << ',' << r.agg_macs << ','
        << r.gemm_macs << ',' << fmt_double(r.est_time_s) << ','
        << fmt_double(r.time_vs_dense) << '\n';
  }
}

void write_time_ratio_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sparsity,biecsr,dense,csr,coo\n";
  for (std::size_t i = 0; i + 3 < rows.size(); i += 4) {
    out << fmt_double(rows[i].sparsity);
    for (std::size_t k = 0; k < 4; ++k) out << ',' << fmt_double(rows[i + k].time_vs_dense);
    out << '\n';
  }
}

void write_feature_traffic_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  // Grid point nearest 0.5.
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t i = 0; i < rows.size(); i += 4) {
    const double d = std::fabs(rows[i].sparsity - 0.5);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  out << "format,feat_read_bytes\n";
  if (rows.empty()) return;
  for (std::size_t k = 0; k < 4 && best + k < rows.size(); ++k) {
    out << format_name(rows[best + k].format) << ',' << rows[best + k].feat_read_bytes
        << '\n';
  }
}

std::optional<double> crossover_midpoint(const std::vector<double>& xs,
                                         const std::vector<double>& ratios) {
  if (xs.size() != ratios.size() || xs.size() < 2) return std::nullopt;
  // First index from which the ratio stays strictly below one.
  std::size_t f = xs.size();
  for (std::size_t i = xs.size(); i-- > 0;) {
    if (ratios[i] < 1.0) {
      f = i;
    } else {
      break;
    }
  }
  if (f == xs.size() || f == 0) return std::nullopt;  // never wins, or never loses
  // Clean crossing: everything before f is at or above one.
  for (std::size_t i = 0; i < f; ++i) {
    if (ratios[i] < 1.0) return std::nullopt;
  }
  return (xs[f - 1] + xs[f]) / 2.0;
}

namespace {

const SweepRow* find_row(const std::vector<SweepRow>& rows, double sparsity,
                         FeatureFormat f) {
  for (const SweepRow& r : rows) {
    if (r.format == f && std::fabs(r.sparsity - sparsity) < 1e-12) return &r;
  }
  return nullptr;
}

}  // namespace

void write_summary(std::ostream& out, const std::vector<SweepRow>& rows,
                   const SweepConfig& cfg) {
  out << "workload: V=" << cfg.num_vertices << " degree=" << cfg.degree
      << " width=" << cfg.width << " layers=" << cfg.num_layers
      << " unit_width=" << cfg.unit_width << " line=" << cfg.line_bytes
      << " cache=" << cfg.cache_bytes << "B/" << cfg.cache_ways << "-way"
      << " input_sparsity=" << fmt_double(cfg.input_sparsity) << "\n";

  std::vector<double> xs, bie_vs_dense, csr_vs_bie;
  for (std::size_t i = 0; i + 3 < rows.size(); i += 4) {
    xs.push_back(rows[i].sparsity);
    bie_vs_dense.push_back(rows[i].time_vs_dense);
    csr_vs_bie.push_back(rows[i + 2].est_time_s / rows[i].est_time_s);
  }
  out << "modeled time ratio (compressed/dense) per sparsity:\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out << "  s=" << fmt_double(xs[i]) << "  bie/dense=" << fmt_double(bie_vs_dense[i])
        << "  csr/bie=" << fmt_double(csr_vs_bie[i]) << "\n";
  }
  if (auto c = crossover_midpoint(xs, bie_vs_dense)) {
    out << "compressed-beats-dense crossover (bracket midpoint): s=" << fmt_double(*c)
        << "\n";
  } else {
    out << "compressed-beats-dense crossover: none\n";
  }
  if (auto c = crossover_midpoint(xs, csr_vs_bie)) {
    out << "csr-beats-compressed crossover (bracket midpoint): s=" << fmt_double(*c)
        << "\n";
  } else {
    out << "csr-beats-compressed crossover: none\n";
  }

  for (double s : {0.50, 0.55, 0.60}) {
    const SweepRow* b = find_row(rows, s, FeatureFormat::biecsr);
    const SweepRow* d = find_row(rows, s, FeatureFormat::dense);
    if (b && d) {
      out << "feature-read bytes at s=" << fmt_double(s) << ": compressed/dense = "
          << fmt_double(double(b->feat_read_bytes) / double(d->feat_read_bytes))
          << "\n";
    }
  }
  const SweepRow* b = find_row(rows, 0.50, FeatureFormat::biecsr);
  const SweepRow* d = find_row(rows, 0.50, FeatureFormat::dense);
  const SweepRow* c = find_row(rows, 0.50, FeatureFormat::csr);
  const SweepRow* o = find_row(rows, 0.50, FeatureFormat::coo);
  if (b && d && c && o) {
    out << "feature DRAM bytes at s=0.5: bie=" << b->feat_read_bytes
        << " dense=" << d->feat_read_bytes << " csr=" << c->feat_read_bytes
        << " coo=" << o->feat_read_bytes << "\n";
  }
}

// --- SAC experiment ----------------------------------------------------------

u64 tile_working_set_bytes(const Graph& g, u32 tile_rows, u32 width,
                           u32 unit_width, u32 line_bytes) {
  if (tile_rows == 0) tile_rows = g.num_vertices;
  const u64 row_footprint =
      u64(slices_per_row(width, unit_width)) * reserved_slice_bytes(unit_width, line_bytes);
  u64 worst = 0;
  for (u32 r0 = 0; r0 < g.num_vertices; r0 += tile_rows) {
    const u32 r1 = std::min(g.num_vertices, r0 + tile_rows);
    std::unordered_set<u32> sources;
    for (u32 v = r0; v < r1; ++v) {
      for (u64 e = g.row_ptr[v]; e < g.row_ptr[v + 1]; ++e) {
        sources.insert(g.col_idx[e]);
      }
    }
    worst = std::max(worst, u64(sources.size()) * row_footprint);
  }
  return worst;
}

SacResult run_sac_experiment(const SacConfig& cfg) {
  const Graph g = gen_topic_block_graph(cfg.num_vertices, cfg.draws_per_row,
                                        cfg.block_rows, cfg.strip_height,
                                        cfg.engines, cfg.graph_seed);
  SacResult res;
  res.working_set_bytes = tile_working_set_bytes(g, cfg.tile_rows, cfg.width,
                                                 cfg.unit_width, cfg.line_bytes);
  const u64 set_bytes = u64(cfg.cache_sets) * cfg.line_bytes;
  const u64 target = res.working_set_bytes / 2;
  res.cache_ways = u32(std::max<u64>(1, (target + set_bytes / 2) / set_bytes));
  res.cache_bytes = u64(res.cache_ways) * set_bytes;
  const CacheConfig ccfg{res.cache_bytes, res.cache_ways, cfg.line_bytes};

  std::mt19937_64 rng(cfg.meta_seed);
  const LayerMeta in_meta = gen_random_meta(cfg.num_vertices, cfg.width,
                                            cfg.unit_width, cfg.sparsity, rng);
  const LayerMeta out_meta = gen_random_meta(cfg.num_vertices, cfg.width,
                                             cfg.unit_width, cfg.sparsity, rng);

  for (bool sac : {false, true}) {
    TraceOptions topts;
    topts.format = FeatureFormat::biecsr;
    topts.line_bytes = cfg.line_bytes;
    topts.weighted = cfg.weighted;
    topts.sac = sac;
    topts.strip_height = cfg.strip_height;
    topts.engines = cfg.engines;
    topts.tile_rows = cfg.tile_rows;
    topts.tile_sources = 0;  // full source range per pass: the reuse span under test
    LayerTrace t = build_residual_layer_trace(g, in_meta, out_meta, topts);
    SetAssocLru cache(ccfg);
    TrafficCounters ctr;
    run_trace(cache, ctr, t.events);
    ctr.agg_macs = t.agg_macs;
    ctr.gemm_macs = t.gemm_macs;
    const double time = estimate_time_seconds(ctr.total_dram_bytes(), ctr.agg_macs,
                                              ctr.gemm_macs);
    if (sac) {
      res.hit_sac = ctr.cache_hit_rate();
      res.time_sac_s = time;
      res.feat_sac = ctr.of(TrafficClass::feature).dram_bytes;
      res.dram_sac = ctr.total_dram_bytes();
    } else {
      res.hit_ascending = ctr.cache_hit_rate();
      res.time_ascending_s = time;
      res.feat_ascending = ctr.of(TrafficClass::feature).dram_bytes;
      res.dram_ascending = ctr.total_dram_bytes();
    }
  }
  return res;
}

// --- key=value config --------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

u64 to_u64(const std::string& v) { return std::stoull(v); }
u32 to_u32(const std::string& v) {
  const u64 x = std::stoull(v);
  if (x > 0xffffffffull) throw std::out_of_range("value too large: " + v);
  return u32(x);
}
double to_f64(const std::string& v) { return std::stod(v); }
bool to_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

std::vector<double> to_grid(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw std::invalid_argument("empty sparsity grid");
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_kv_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  u64 lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key");
    }
    kv[key] = val;
  }
  return kv;
}

SweepConfig sweep_config_from_kv(const std::map<std::string, std::string>& kv) {
  SweepConfig cfg;
  for (const auto& [k, v] : kv) {
    if (k == "num_vertices") cfg.num_vertices = to_u32(v);
    else if (k == "degree") cfg.degree = to_u32(v);
    else if (k == "width") cfg.width = to_u32(v);
    else if (k == "num_layers") cfg.num_layers = to_u32(v);
    else if (k == "unit_width") cfg.unit_width = to_u32(v);
    else if (k == "line_bytes") cfg.line_bytes = to_u32(v);
    else if (k == "cache_bytes") cfg.cache_bytes = to_u64(v);
    else if (k == "cache_ways") cfg.cache_ways = to_u32(v);
    else if (k == "weighted") cfg.weighted = to_bool(v);
    else if (k == "input_sparsity") cfg.input_sparsity = to_f64(v);
    else if (k == "sparsity_grid") cfg.sparsity_grid = to_grid(v);
    else if (k == "graph_seed") cfg.graph_seed = to_u64(v);
    else if (k == "meta_seed") cfg.meta_seed = to_u64(v);
    else throw std::runtime_error("unknown sweep config key: " + k);
  }
  return cfg;
}

SacConfig sac_config_from_kv(const std::map<std::string, std::string>& kv) {
  SacConfig cfg;
  for (const auto& [k, v] : kv) {
    if (k == "num_vertices") cfg.num_vertices = to_u32(v);
    else if (k == "draws_per_row") cfg.draws_per_row = to_u32(v);
    else if (k == "block_rows") cfg.block_rows = to_u32(v);
    else if (k == "strip_height") cfg.strip_height = to_u32(v);
    else if (k == "engines") cfg.engines = to_u32(v);
    else if (k == "width") cfg.width = to_u32(v);
    else if (k == "unit_width") cfg.unit_width = to_u32(v);
    else if (k == "line_bytes") cfg.line_bytes = to_u32(v);
    else if (k == "tile_rows") cfg.tile_rows = to_u32(v);
    else if (k == "sparsity") cfg.sparsity = to_f64(v);
    else if (k == "weighted") cfg.weighted = to_bool(v);
    else if (k == "graph_seed") cfg.graph_seed = to_u64(v);
    else if (k == "meta_seed") cfg.meta_seed = to_u64(v);
    else if (k == "cache_sets") cfg.cache_sets = to_u32(v);
    else throw std::runtime_error("unknown sac config key: " + k);
  }
  return cfg;
}

}  // namespace gcnsim
