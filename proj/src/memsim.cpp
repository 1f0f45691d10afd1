#include "gcnsim/memsim.hpp"

#include <algorithm>
#include <stdexcept>

namespace gcnsim {

namespace {

bool is_pow2(u64 v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

SetAssocLru::SetAssocLru(const CacheConfig& cfg) : cfg_(cfg) {
  if (!is_pow2(cfg.line_bytes)) {
    throw std::invalid_argument("cache line size must be a power of two");
  }
  if (cfg.ways == 0) throw std::invalid_argument("cache needs at least one way");
  const u64 set_bytes = u64(cfg.ways) * cfg.line_bytes;
  if (cfg.capacity_bytes == 0 || cfg.capacity_bytes % set_bytes != 0) {
    throw std::invalid_argument("capacity must be a multiple of ways * line size");
  }
  const u64 sets = cfg.capacity_bytes / set_bytes;
  if (!is_pow2(sets)) {
    throw std::invalid_argument("number of cache sets must be a power of two");
  }
  set_mask_ = sets - 1;
  sets_.assign(sets, {});
  for (auto& s : sets_) s.reserve(cfg.ways);
}

bool SetAssocLru::access(u64 line_id) {
  auto& set = sets_[line_id & set_mask_];
  auto it = std::find(set.begin(), set.end(), line_id);
  if (it != set.end()) {
    set.erase(it);
    set.push_back(line_id);  // most recently used at the back
    return true;
  }
  if (set.size() == cfg_.ways) set.erase(set.begin());  // evict least recent
  set.push_back(line_id);
  return false;
}

bool SetAssocLru::contains(u64 line_id) const {
  const auto& set = sets_[line_id & set_mask_];
  return std::find(set.begin(), set.end(), line_id) != set.end();
}

void SetAssocLru::invalidate(u64 line_id) {
  auto& set = sets_[line_id & set_mask_];
  auto it = std::find(set.begin(), set.end(), line_id);
  if (it != set.end()) set.erase(it);
}

TrafficClass traffic_class(TraceKind kind) {
  switch (kind) {
    case TraceKind::topo_read: return TrafficClass::topology;
    case TraceKind::feat_read: return TrafficClass::feature;
    case TraceKind::residual_read:
    case TraceKind::residual_write: return TrafficClass::residual;
    case TraceKind::weight_read: return TrafficClass::weight;
    case TraceKind::output_write: return TrafficClass::output;
  }
  throw std::invalid_argument("bad trace kind");
}

u64 TrafficCounters::total_dram_bytes() const {
  u64 sum = 0;
  for (const PerClass& c : cls) sum += c.dram_bytes;
  return sum;
}

double TrafficCounters::cache_hit_rate() const {
  const PerClass& t = of(TrafficClass::topology);
  const PerClass& f = of(TrafficClass::feature);
  const u64 req = t.line_requests + f.line_requests;
  if (req == 0) return 0.0;
  return double(t.hits + f.hits) / double(req);
}

void run_trace(SetAssocLru& cache, TrafficCounters& ctr,
               const std::vector<TraceEvent>& events) {
  const u32 line = cache.config().line_bytes;
  for (const TraceEvent& e : events) {
    if (e.bytes == 0) continue;
    const u64 first = e.addr / line;
    const u64 last = (e.addr + e.bytes - 1) / line;
    auto& c = ctr.of(traffic_class(e.kind));
    const bool writes = trace_kind_writes(e.kind);
    const bool allocates = trace_kind_allocates(e.kind);
    for (u64 id = first; id <= last; ++id) {
      c.line_requests += 1;
      if (writes) {
        // Write-around: the line goes straight to memory and any cached copy
        // becomes stale.
        cache.invalidate(id);
        c.dram_bytes += line;
        continue;
      }
      if (allocates) {
        if (cache.access(id)) {
          c.hits += 1;
        } else {
          c.dram_bytes += line;
        }
      } else {
        // Streaming reads bypass the cache entirely.
        c.dram_bytes += line;
      }
    }
  }
}

double estimate_time_seconds(u64 dram_bytes, u64 agg_macs, u64 gemm_macs) {
  const double mem = double(dram_bytes) / kDramBytesPerSec;
  const double agg = double(agg_macs) / kAggMacsPerSec;
  const double gemm = double(gemm_macs) / kGemmMacsPerSec;
  return std::max(mem, std::max(agg, gemm));
}

}  // namespace gcnsim
