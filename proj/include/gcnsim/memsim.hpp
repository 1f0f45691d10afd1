#pragma once

#include "gcnsim/schedule.hpp"
#include "gcnsim/types.hpp"

namespace gcnsim {

// --- set-associative LRU cache ----------------------------------------------

struct CacheConfig {
  u64 capacity_bytes = 512 * 1024;
  u32 ways = 16;
  u32 line_bytes = 64;

  u64 num_sets() const { return capacity_bytes / (u64(ways) * line_bytes); }
};

class SetAssocLru {
 public:
  // Requires: line_bytes a power of two, ways >= 1, and a power-of-two,
  // nonzero set count dividing the capacity exactly. Throws otherwise.
  explicit SetAssocLru(const CacheConfig& cfg);

  // Lookup + allocate: hit moves the line to MRU; miss inserts it at MRU and
  // evicts the LRU line of the set if needed. Returns hit.
  bool access(u64 line_id);
  bool contains(u64 line_id) const;
  void invalidate(u64 line_id);
  const CacheConfig& config() const { return cfg_; }

 private:
  CacheConfig cfg_;
  u64 set_mask_ = 0;
  std::vector<std::vector<u64>> sets_;  // per set: line ids, LRU first, MRU last
};

// --- traffic accounting ------------------------------------------------------

enum class TrafficClass : u8 { topology = 0, feature = 1, residual = 2, weight = 3, output = 4 };
constexpr u32 kNumTrafficClasses = 5;

TrafficClass traffic_class(TraceKind k);

struct TrafficCounters {
  struct PerClass {
    u64 line_requests = 0;
    u64 hits = 0;
    u64 dram_bytes = 0;
  };
  PerClass cls[kNumTrafficClasses];
  u64 agg_macs = 0;
  u64 gemm_macs = 0;

  const PerClass& of(TrafficClass c) const { return cls[u32(c)]; }
  PerClass& of(TrafficClass c) { return cls[u32(c)]; }
  u64 total_dram_bytes() const;
  // Hit rate over the allocating classes (topology + feature).
  double cache_hit_rate() const;
};

// Walks each event line by line at the cache's line granularity.
// Allocating reads probe the cache and pay DRAM per missed line; bypass reads
// pay DRAM for every line; writes invalidate and pay DRAM for every line.
void run_trace(SetAssocLru& cache, TrafficCounters& ctr,
               const std::vector<TraceEvent>& events);

// --- bandwidth / compute model ----------------------------------------------

constexpr double kDramBytesPerSec = 256e9;    // HBM2-class aggregate bandwidth
constexpr double kAggMacsPerSec = 128e9;      // 8 engines x 16 lanes x 1 GHz
constexpr double kGemmMacsPerSec = 8.192e12;  // 8 arrays x 32x32 x 1 GHz

// Bottleneck model: whichever of the memory stream and the two compute
// pipelines takes longest.
double estimate_time_seconds(u64 dram_bytes, u64 agg_macs, u64 gemm_macs);

}  // namespace gcnsim
