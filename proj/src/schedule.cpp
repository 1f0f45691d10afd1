#include "gcnsim/schedule.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace gcnsim {

// --- trace serialization -----------------------------------------------------

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

}  // namespace

void save_trace(std::ostream& out, const std::vector<TraceEvent>& events) {
  write_bytes(out, "TRC1", 4);
  write_le<u64>(out, events.size());
  for (const TraceEvent& e : events) {
    write_le<u64>(out, e.addr);
    write_le<u32>(out, e.bytes);
    write_le<u8>(out, u8(e.kind));
  }
}

std::vector<TraceEvent> load_trace(std::istream& in) {
  char magic[4];
  read_bytes(in, magic, 4);
  if (std::memcmp(magic, "TRC1", 4) != 0) throw std::runtime_error("bad magic");
  const u64 count = read_le<u64>(in);
  std::vector<TraceEvent> events(count);
  for (TraceEvent& e : events) {
    e.addr = read_le<u64>(in);
    e.bytes = read_le<u32>(in);
    const u8 kind = read_le<u8>(in);
    if (kind > u8(TraceKind::output_write)) throw std::runtime_error("bad trace kind");
    e.kind = TraceKind(kind);
  }
  return events;
}

// --- processing order --------------------------------------------------------

std::vector<u32> sac_row_order(u32 rows, u32 strip_height, u32 engines) {
  if (strip_height == 0 || engines == 0) {
    throw std::invalid_argument("strip_height and engines must be nonzero");
  }
  const u32 nstrips = u32(ceil_div(rows, strip_height));
  std::vector<std::vector<u32>> seqs(engines);
  for (u32 e = 0; e < engines; ++e) {
    for (u32 s = e; s < nstrips; s += engines) {
      const u32 end = std::min(rows, (s + 1) * strip_height);
      for (u32 r = s * strip_height; r < end; ++r) seqs[e].push_back(r);
    }
  }
  std::vector<u32> out;
  out.reserve(rows);
  std::vector<std::size_t> idx(engines, 0);
  std::vector<u32> active;
  for (u32 e = 0; e < engines; ++e) {
    if (!seqs[e].empty()) active.push_back(e);
  }
  while (!active.empty()) {
    std::vector<u32> next;
    next.reserve(active.size());
    for (u32 e : active) {
      out.push_back(seqs[e][idx[e]]);
      ++idx[e];
      if (idx[e] < seqs[e].size()) next.push_back(e);
    }
    active = std::move(next);
  }
  return out;
}

// --- formats -----------------------------------------------------------------

const char* format_name(FeatureFormat f) {
  switch (f) {
    case FeatureFormat::biecsr: return "biecsr";
    case FeatureFormat::dense: return "dense";
    case FeatureFormat::csr: return "csr";
    case FeatureFormat::coo: return "coo";
  }
  return "?";
}

FeatureFormat parse_format(std::string_view name) {
  if (name == "biecsr") return FeatureFormat::biecsr;
  if (name == "dense") return FeatureFormat::dense;
  if (name == "csr") return FeatureFormat::csr;
  if (name == "coo") return FeatureFormat::coo;
  throw std::invalid_argument("unknown feature format: " + std::string(name));
}

// --- layer metadata ----------------------------------------------------------

u64 LayerMeta::total_nnz() const {
  return std::accumulate(row_nnz.begin(), row_nnz.end(), u64(0));
}

LayerMeta meta_from_matrix(const Matrix& m, u32 unit_width) {
  LayerMeta meta;
  meta.num_rows = u32(m.rows);
  meta.width = u32(m.cols);
  meta.unit_width = unit_width;
  const u32 spr = meta.spr();
  meta.slice_nnz.assign(u64(meta.num_rows) * spr, 0);
  meta.row_nnz.assign(meta.num_rows, 0);
  for (u32 v = 0; v < meta.num_rows; ++v) {
    const float* row = m.row(v);
    for (u32 k = 0; k < spr; ++k) {
      const u32 w = slice_width(meta.width, unit_width, k);
      u16 nnz = 0;
      for (u32 j = 0; j < w; ++j) {
        if (row[u64(k) * unit_width + j] != 0.0f) ++nnz;
      }
      meta.slice_nnz[u64(v) * spr + k] = nnz;
      meta.row_nnz[v] += nnz;
    }
  }
  return meta;
}

LayerMeta meta_from_biecsr(const BiecsrMatrix& m) {
  LayerMeta meta;
  meta.num_rows = m.num_rows;
  meta.width = m.width;
  meta.unit_width = m.cfg.unit_width;
  meta.slice_nnz = m.slice_nnz;
  meta.row_nnz.assign(meta.num_rows, 0);
  for (u32 v = 0; v < meta.num_rows; ++v) meta.row_nnz[v] = m.row_nnz(v);
  return meta;
}

LayerMeta gen_random_meta(u32 rows, u32 width, u32 unit_width, double sparsity,
                          std::mt19937_64& rng) {
  LayerMeta meta;
  meta.num_rows = rows;
  meta.width = width;
  meta.unit_width = unit_width;
  const u32 spr = meta.spr();
  meta.slice_nnz.assign(u64(rows) * spr, 0);
  meta.row_nnz.assign(rows, 0);
  for (u32 v = 0; v < rows; ++v) {
    for (u32 k = 0; k < spr; ++k) {
      const u32 w = slice_width(width, unit_width, k);
      u16 nnz = 0;
      for (u32 j = 0; j < w; ++j) {
        const double u = double(rng() >> 11) * 0x1.0p-53;
        if (u >= sparsity) ++nnz;
      }
      meta.slice_nnz[u64(v) * spr + k] = nnz;
      meta.row_nnz[v] += nnz;
    }
  }
  return meta;
}

// --- trace builders ----------------------------------------------------------

namespace {

// Sequential line-aligned regions separated by one guard line, so distinct
// arrays never share a memory line.
struct RegionCursor {
  u64 cur = 0;
  u32 line;
  explicit RegionCursor(u32 line_bytes) : line(line_bytes) {}
  u64 add(u64 size) {
    const u64 base = cur;
    cur = align_up(cur + size, line) + line;
    return base;
  }
};

struct CsrLayout {
  u64 rowptr = 0;
  u64 values = 0;
  u64 indices = 0;
  std::vector<u64> value_off;  // per-row byte offset into the value array
};

CsrLayout make_csr_layout(RegionCursor& rc, const LayerMeta& meta) {
  CsrLayout l;
  l.rowptr = rc.add((u64(meta.num_rows) + 1) * 8);
  const u64 bytes = std::max<u64>(4, meta.total_nnz() * kElemBytes);
  l.values = rc.add(bytes);
  l.indices = rc.add(bytes);
  l.value_off.assign(meta.num_rows + 1, 0);
  for (u32 v = 0; v < meta.num_rows; ++v) {
    l.value_off[v + 1] = l.value_off[v] + u64(meta.row_nnz[v]) * kElemBytes;
  }
  return l;
}

struct CooLayout {
  u64 base = 0;
  std::vector<u64> off;  // per-row byte offset (12 bytes per nonzero)
};

CooLayout make_coo_layout(RegionCursor& rc, const LayerMeta& meta) {
  CooLayout l;
  l.base = rc.add(std::max<u64>(4, meta.total_nnz() * 12));
  l.off.assign(meta.num_rows + 1, 0);
  for (u32 v = 0; v < meta.num_rows; ++v) {
    l.off[v + 1] = l.off[v] + u64(meta.row_nnz[v]) * 12;
  }
  return l;
}

void check_meta(const LayerMeta& meta, u32 rows, const char* what) {
  if (meta.num_rows != rows) {
    throw std::invalid_argument(std::string(what) + ": row count mismatch");
  }
  if (meta.slice_nnz.size() != u64(rows) * meta.spr() ||
      meta.row_nnz.size() != rows) {
    throw std::invalid_argument(std::string(what) + ": malformed metadata");
  }
}

// Emits the output-side events for one destination row.
struct OutputWriter {
  FeatureFormat format;
  u32 line_bytes;
  const LayerMeta* meta;
  // biecsr / dense
  u64 base = 0;
  u64 slice_stride = 0;  // biecsr: reserved slice bytes; dense: row stride
  // csr / coo
  CsrLayout csr;
  CooLayout coo;

  void emit(std::vector<TraceEvent>& ev, u32 v) const {
    const u32 spr = meta->spr();
    switch (format) {
      case FeatureFormat::biecsr:
        for (u32 k = 0; k < spr; ++k) {
          const u64 lines = slice_touched_lines(meta->slice_nnz[u64(v) * spr + k],
                                                meta->unit_width, line_bytes);
          ev.push_back({base + (u64(v) * spr + k) * slice_stride,
                        u32(lines * line_bytes), TraceKind::output_write});
        }
        break;
      case FeatureFormat::dense:
        ev.push_back({base + u64(v) * slice_stride, meta->width * kElemBytes,
                      TraceKind::output_write});
        break;
      case FeatureFormat::csr: {
        ev.push_back({csr.rowptr + u64(v) * 8, 8, TraceKind::output_write});
        const u64 bytes = u64(meta->row_nnz[v]) * kElemBytes;
        if (bytes) {
          ev.push_back({csr.values + csr.value_off[v], u32(bytes),
                        TraceKind::output_write});
          ev.push_back({csr.indices + csr.value_off[v], u32(bytes),
                        TraceKind::output_write});
        }
        break;
      }
      case FeatureFormat::coo: {
        const u64 bytes = u64(meta->row_nnz[v]) * 12;
        if (bytes) {
          ev.push_back({coo.base + coo.off[v], u32(bytes), TraceKind::output_write});
        }
        break;
      }
    }
  }
};

OutputWriter make_output_writer(RegionCursor& rc, const LayerMeta& meta,
                                FeatureFormat format, u32 line_bytes) {
  OutputWriter w;
  w.format = format;
  w.line_bytes = line_bytes;
  w.meta = &meta;
  switch (format) {
    case FeatureFormat::biecsr:
      w.slice_stride = reserved_slice_bytes(meta.unit_width, line_bytes);
      w.base = rc.add(u64(meta.num_rows) * meta.spr() * w.slice_stride);
      break;
    case FeatureFormat::dense:
      w.slice_stride = align_up(u64(meta.width) * kElemBytes, line_bytes);
      w.base = rc.add(u64(meta.num_rows) * w.slice_stride);
      break;
    case FeatureFormat::csr:
      w.csr = make_csr_layout(rc, meta);
      break;
    case FeatureFormat::coo:
      w.coo = make_coo_layout(rc, meta);
      break;
  }
  return w;
}

}  // namespace

LayerTrace build_residual_layer_trace(const Graph& g, const LayerMeta& input,
                                      const LayerMeta& output,
                                      const TraceOptions& opts) {
  const u32 V = g.num_vertices;
  check_meta(input, V, "input meta");
  check_meta(output, V, "output meta");
  if (input.width != output.width) {
    throw std::invalid_argument("residual layers keep the feature width");
  }
  const u32 n = input.width;
  const u32 line = opts.line_bytes;
  const u32 spr = input.spr();
  const u32 cw = input.unit_width;

  RegionCursor rc(line);
  const u64 rowptr = rc.add((u64(V) + 1) * 8);
  const u64 colidx = rc.add(g.num_edges() * 4);
  const u64 edgew = rc.add(g.num_edges() * 4);  // region exists even unweighted

  // Input-feature layout.
  u64 f_base = 0, f_stride = 0;
  CsrLayout fcsr;
  CooLayout fcoo;
  switch (opts.format) {
    case FeatureFormat::biecsr:
      f_stride = reserved_slice_bytes(cw, line);
      f_base = rc.add(u64(V) * spr * f_stride);
      break;
    case FeatureFormat::dense:
      f_stride = align_up(u64(n) * kElemBytes, line);
      f_base = rc.add(u64(V) * f_stride);
      break;
    case FeatureFormat::csr:
      fcsr = make_csr_layout(rc, input);
      break;
    case FeatureFormat::coo:
      fcoo = make_coo_layout(rc, input);
      break;
  }
  OutputWriter out_writer = make_output_writer(rc, output, opts.format, line);
  const u64 s_stride = align_up(u64(n) * kElemBytes, line);
  const u64 s_base = rc.add(u64(V) * s_stride);
  const u64 w_base = rc.add(u64(n) * n * 4);

  LayerTrace t;
  const u32 tile_rows = opts.tile_rows ? opts.tile_rows : V;
  const u32 tile_sources = opts.tile_sources ? opts.tile_sources : V;

  for (u32 r0 = 0; r0 < V; r0 += tile_rows) {
    const u32 r1 = std::min(V, r0 + tile_rows);
    std::vector<u32> order;
    if (opts.sac) {
      order = sac_row_order(r1 - r0, opts.strip_height, opts.engines);
      for (u32& r : order) r += r0;
    } else {
      order.resize(r1 - r0);
      std::iota(order.begin(), order.end(), r0);
    }

    for (u32 c0 = 0; c0 < V; c0 += tile_sources) {
      const u32 c1 = std::min(V, c0 + tile_sources);
      for (u32 v : order) {
        const u32* row_begin = g.col_idx.data() + g.row_ptr[v];
        const u32* row_end = g.col_idx.data() + g.row_ptr[v + 1];
        const u32* lo = std::lower_bound(row_begin, row_end, c0);
        const u32* hi = std::lower_bound(row_begin, row_end, c1);
        if (lo == hi) continue;
        const u64 e0 = g.row_ptr[v] + u64(lo - row_begin);
        const u32 cnt = u32(hi - lo);
        t.events.push_back({rowptr + u64(v) * 8, 8, TraceKind::topo_read});
        t.events.push_back({colidx + e0 * 4, cnt * 4, TraceKind::topo_read});
        if (opts.weighted) {
          t.events.push_back({edgew + e0 * 4, cnt * 4, TraceKind::topo_read});
        }
        for (const u32* p = lo; p != hi; ++p) {
          const u32 u = *p;
          switch (opts.format) {
            case FeatureFormat::biecsr:
              for (u32 k = 0; k < spr; ++k) {
                const u16 nnz = input.slice_nnz[u64(u) * spr + k];
                const u64 lines = slice_touched_lines(nnz, cw, line);
                t.events.push_back({f_base + (u64(u) * spr + k) * f_stride,
                                    u32(lines * line), TraceKind::feat_read});
              }
              break;
            case FeatureFormat::dense:
              for (u32 k = 0; k < spr; ++k) {
                const u32 w = slice_width(n, cw, k);
                t.events.push_back({f_base + u64(u) * f_stride + u64(k) * cw * kElemBytes,
                                    w * kElemBytes, TraceKind::feat_read});
              }
              break;
            case FeatureFormat::csr: {
              t.events.push_back({fcsr.rowptr + u64(u) * 8, 8, TraceKind::feat_read});
              const u64 bytes = u64(input.row_nnz[u]) * kElemBytes;
              if (bytes) {
                t.events.push_back({fcsr.values + fcsr.value_off[u], u32(bytes),
                                    TraceKind::feat_read});
                t.events.push_back({fcsr.indices + fcsr.value_off[u], u32(bytes),
                                    TraceKind::feat_read});
              }
              break;
            }
            case FeatureFormat::coo: {
              const u64 bytes = u64(input.row_nnz[u]) * 12;
              if (bytes) {
                t.events.push_back({fcoo.base + fcoo.off[u], u32(bytes),
                                    TraceKind::feat_read});
              }
              break;
            }
          }
          t.agg_macs += input.row_nnz[u];
        }
      }
    }

    // Combination pass for this row tile.
    t.events.push_back({w_base, u32(u64(n) * n * 4), TraceKind::weight_read});
    for (u32 v = r0; v < r1; ++v) {
      t.events.push_back({s_base + u64(v) * s_stride, n * kElemBytes,
                          TraceKind::residual_read});
    }
    for (u32 v = r0; v < r1; ++v) {
      t.events.push_back({s_base + u64(v) * s_stride, n * kElemBytes,
                          TraceKind::residual_write});
      out_writer.emit(t.events, v);
    }
    t.gemm_macs += u64(r1 - r0) * n * n;
  }
  return t;
}

LayerTrace build_projection_trace(const LayerMeta& input, const LayerMeta& output,
                                  const TraceOptions& opts) {
  if (input.num_rows != output.num_rows) {
    throw std::invalid_argument("projection input/output row mismatch");
  }
  const u32 V = input.num_rows;
  check_meta(input, V, "input meta");
  check_meta(output, V, "output meta");
  const u32 line = opts.line_bytes;
  const u32 n_out = output.width;

  RegionCursor rc(line);
  CsrLayout in_csr = make_csr_layout(rc, input);  // inputs are dataset-format
  OutputWriter out_writer = make_output_writer(rc, output, opts.format, line);
  const u64 s_stride = align_up(u64(n_out) * kElemBytes, line);
  const u64 s_base = rc.add(u64(V) * s_stride);
  const u64 w_base = rc.add(u64(input.width) * n_out * 4);

  LayerTrace t;
  for (u32 v = 0; v < V; ++v) {
    t.events.push_back({in_csr.rowptr + u64(v) * 8, 8, TraceKind::feat_read});
    const u64 bytes = u64(input.row_nnz[v]) * kElemBytes;
    if (bytes) {
      t.events.push_back({in_csr.values + in_csr.value_off[v], u32(bytes),
                          TraceKind::feat_read});
      t.events.push_back({in_csr.indices + in_csr.value_off[v], u32(bytes),
                          TraceKind::feat_read});
    }
    t.agg_macs += u64(input.row_nnz[v]) * n_out;
  }
  t.events.push_back({w_base, u32(u64(input.width) * n_out * 4),
                      TraceKind::weight_read});
  for (u32 v = 0; v < V; ++v) {
    t.events.push_back({s_base + u64(v) * s_stride, n_out * kElemBytes,
                        TraceKind::residual_write});
    out_writer.emit(t.events, v);
  }
  return t;
}

}  // namespace gcnsim
