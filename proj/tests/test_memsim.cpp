#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "gcnsim/memsim.hpp"
#include "oracles.hpp"

using namespace gcnsim;

TEST_CASE("cache geometry validation") {
  CHECK(CacheConfig{1 << 20, 16, 64}.num_sets() == 1024);
  CHECK(CacheConfig{344064, 21, 64}.num_sets() == 256);
  CHECK_NOTHROW(SetAssocLru(CacheConfig{344064, 21, 64}));
  CHECK_THROWS_AS(SetAssocLru(CacheConfig{1 << 20, 16, 48}), std::invalid_argument);
  CHECK_THROWS_AS(SetAssocLru(CacheConfig{1 << 20, 0, 64}), std::invalid_argument);
  CHECK_THROWS_AS(SetAssocLru(CacheConfig{(1 << 20) + 64, 16, 64}),
                  std::invalid_argument);
  // 3 sets: divides evenly but is not a power of two.
  CHECK_THROWS_AS(SetAssocLru(CacheConfig{3 * 16 * 64, 16, 64}), std::invalid_argument);
  CHECK_THROWS_AS(SetAssocLru(CacheConfig{0, 16, 64}), std::invalid_argument);
}

TEST_CASE("hit, miss, move-to-front, eviction") {
  SetAssocLru c(CacheConfig{2 * 64, 2, 64});  // one set, two ways
  CHECK(!c.access(10));  // miss
  CHECK(!c.access(20));  // miss
  CHECK(c.access(10));   // hit, 10 becomes most recent
  CHECK(!c.access(30));  // miss, evicts 20 (least recent)
  CHECK(!c.access(20));  // 20 is gone
  CHECK(c.contains(30));
  CHECK(c.contains(20));  // reinserted by the probe above
  CHECK(!c.contains(10));
}

TEST_CASE("sets are independent") {
  SetAssocLru c(CacheConfig{2 * 64, 1, 64});  // two sets, one way each
  CHECK(!c.access(0));  // set 0
  CHECK(!c.access(1));  // set 1
  CHECK(c.access(0));   // still resident
  CHECK(!c.access(2));  // set 0, evicts 0
  CHECK(!c.access(0));
  CHECK(c.access(1));  // set 1 undisturbed
}

TEST_CASE("invalidate removes a line") {
  SetAssocLru c(CacheConfig{4 * 64, 4, 64});
  c.access(5);
  CHECK(c.contains(5));
  c.invalidate(5);
  CHECK(!c.contains(5));
  c.invalidate(5);  // no-op on absent lines
  CHECK(!c.access(5));
}

TEST_CASE("line expansion of byte extents") {
  SetAssocLru c(CacheConfig{1 << 16, 16, 64});
  TrafficCounters ctr;
  run_trace(c, ctr, {{0, 256, TraceKind::feat_read}});
  CHECK(ctr.of(TrafficClass::feature).line_requests == 4);
  CHECK(ctr.of(TrafficClass::feature).hits == 0);
  CHECK(ctr.of(TrafficClass::feature).dram_bytes == 256);

  run_trace(c, ctr, {{0, 256, TraceKind::feat_read}});
  CHECK(ctr.of(TrafficClass::feature).line_requests == 8);
  CHECK(ctr.of(TrafficClass::feature).hits == 4);
  CHECK(ctr.of(TrafficClass::feature).dram_bytes == 256);

  // An extent straddling a line boundary touches both lines.
  run_trace(c, ctr, {{1024 + 60, 8, TraceKind::topo_read}});
  CHECK(ctr.of(TrafficClass::topology).line_requests == 2);
  CHECK(ctr.of(TrafficClass::topology).dram_bytes == 128);
}

TEST_CASE("streamed classes bypass; writes invalidate") {
  SetAssocLru c(CacheConfig{1 << 16, 16, 64});
  TrafficCounters ctr;
  // Weight and residual reads pay full DRAM and do not populate the cache.
  run_trace(c, ctr, {{0, 128, TraceKind::weight_read}});
  CHECK(ctr.of(TrafficClass::weight).dram_bytes == 128);
  CHECK(!c.contains(0));
  run_trace(c, ctr, {{0, 128, TraceKind::weight_read}});
  CHECK(ctr.of(TrafficClass::weight).dram_bytes == 256);
  CHECK(ctr.of(TrafficClass::weight).hits == 0);

  run_trace(c, ctr, {{4096, 64, TraceKind::residual_read}});
  CHECK(ctr.of(TrafficClass::residual).dram_bytes == 64);
  CHECK(!c.contains(64));

  // A write knocks out a cached copy.
  run_trace(c, ctr, {{8192, 64, TraceKind::feat_read}});
  CHECK(c.contains(128));
  run_trace(c, ctr, {{8192, 64, TraceKind::output_write}});
  CHECK(!c.contains(128));
  CHECK(ctr.of(TrafficClass::output).dram_bytes == 64);
  run_trace(c, ctr, {{8192, 64, TraceKind::feat_read}});
  CHECK(ctr.of(TrafficClass::feature).hits == 0);  // stale copy was dropped

  run_trace(c, ctr, {{12288, 64, TraceKind::residual_write}});
  CHECK(ctr.of(TrafficClass::residual).dram_bytes == 128);
}

TEST_CASE("hit rate covers only the allocating classes") {
  SetAssocLru c(CacheConfig{1 << 16, 16, 64});
  TrafficCounters ctr;
  run_trace(c, ctr, {{0, 64, TraceKind::feat_read},
                     {0, 64, TraceKind::feat_read},
                     {64, 64, TraceKind::topo_read},
                     {0, 6400, TraceKind::weight_read}});
  // feature: 1 miss + 1 hit; topology: 1 miss. Weight traffic is excluded.
  CHECK(ctr.cache_hit_rate() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  TrafficCounters empty;
  CHECK(empty.cache_hit_rate() == 0.0);
}

TEST_CASE("dram byte totals add across classes") {
  SetAssocLru c(CacheConfig{1 << 16, 16, 64});
  TrafficCounters ctr;
  run_trace(c, ctr, {{0, 64, TraceKind::feat_read},
                     {4096, 64, TraceKind::topo_read},
                     {8192, 64, TraceKind::weight_read},
                     {12288, 64, TraceKind::residual_write},
                     {16384, 64, TraceKind::output_write}});
  CHECK(ctr.total_dram_bytes() == 5 * 64);
  ctr.agg_macs = 7;
  ctr.gemm_macs = 9;
  CHECK(ctr.total_dram_bytes() == 5 * 64);  // macs are not bytes
}

TEST_CASE("bottleneck time estimate") {
  CHECK(estimate_time_seconds(2'000'000'000ull, 0, 0) == 7.8125e-3);
  CHECK(estimate_time_seconds(0, 128'000'000'000ull, 0) == 1.0);
  CHECK(estimate_time_seconds(0, 0, 8'192'000'000'000ull) == 1.0);
  // The slowest unit wins.
  CHECK(estimate_time_seconds(2'000'000'000ull, 128'000'000'000ull, 1) == 1.0);
  CHECK(estimate_time_seconds(256, 128, 8192) ==
        doctest::Approx(1e-9).epsilon(1e-12));
}

// The recency-depth rule characterizes LRU only for pure access streams, so
// no invalidations here (they are covered by their own cases above).
TEST_CASE("lru agrees with the recency-stack oracle on random traffic") {
  const u64 sets = 16, ways = 4;
  SetAssocLru c(CacheConfig{sets * ways * 64, u32(ways), 64});
  oracles::StackDistOracle oracle(sets, ways);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20000; ++i) {
    const u64 line = rng() % 256;
    CHECK(c.access(line) == oracle.access(line));
  }
  for (u64 line = 0; line < 256; ++line) {
    CHECK(c.contains(line) == oracle.resident(line, ways));
  }
}
