#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "sccl/bench.hpp"
#include "sccl/errors.hpp"

using sccl::BenchConfig;
using sccl::BenchRow;

TEST_CASE("sweep parsing expands the cross product") {
  const std::vector<BenchConfig> configs =
      sccl::parse_sweep("cg=2,4,8;co=25,50,75;cin=64;cout=64;spatial=16;batch=8");
  CHECK(configs.size() == 9);
  for (const BenchConfig& c : configs) {
    CHECK(c.c_in == 64);
    CHECK(c.c_out == 64);
    CHECK(c.spatial == 16);
    CHECK(c.batch == 8);
  }
  CHECK(configs.front().cg == 2);
  CHECK(configs.back().cg == 8);
  // co=25 is a percentage: width 32 under cg=2 resolves to 8 channels.
  CHECK(configs.front().co.resolve(32) == 8);
  CHECK(configs.back().co.resolve(8) == 6);
}

TEST_CASE("sweep parsing accepts fractions and keeps defaults") {
  const std::vector<BenchConfig> configs = sccl::parse_sweep("co=0.5;cg=4");
  REQUIRE(configs.size() == 1);
  const BenchConfig& c = configs.front();
  CHECK(c.c_in == 64);
  CHECK(c.c_out == 64);
  CHECK(c.cg == 4);
  CHECK(c.spatial == 16);
  CHECK(c.batch == 8);
  CHECK(c.co.resolve(16) == 8);
}

TEST_CASE("sweep parsing rejects bad input") {
  CHECK_THROWS_AS(sccl::parse_sweep("bogus=3"), sccl::ArgumentError);
  CHECK_THROWS_AS(sccl::parse_sweep("cg="), sccl::ArgumentError);
  CHECK_THROWS_AS(sccl::parse_sweep("cg=abc"), sccl::ArgumentError);
  CHECK_THROWS_AS(sccl::parse_sweep("cg=0"), sccl::ArgumentError);
  CHECK_THROWS_AS(sccl::parse_sweep("cin=-4"), sccl::ArgumentError);
}

TEST_CASE("bench produces a row per implementation and phase") {
  std::vector<BenchConfig> configs = sccl::parse_sweep("cin=16;cout=16;cg=2;co=50;spatial=4;batch=1");
  sccl::BenchOptions opts;
  opts.repeats = 1;
  opts.seed = 3;
  const std::vector<BenchRow> rows = sccl::run_bench(configs, opts);
  REQUIRE(rows.size() == 10);

  std::set<std::pair<std::string, std::string>> seen;
  for (const BenchRow& r : rows) {
    seen.insert({r.implementation, r.phase});
    CHECK(r.wall_ms > 0.0);
  }
  for (const char* impl : {"direct", "channel_stack", "channel_stack_cc",
                           "conv_stack", "conv_stack_cc"}) {
    CHECK(seen.count({impl, "forward"}) == 1);
    CHECK(seen.count({impl, "backward"}) == 1);
  }

  // Storage accounting: the direct kernel stacks nothing; the cycle-aware
  // variants stack one window set per distinct window.
  // cin=16, cg=2 -> width 8, 50% overlap -> shift 4 -> 4 distinct windows.
  for (const BenchRow& r : rows) {
    if (r.implementation == "direct") CHECK(r.aux_channels == 0);
    if (r.implementation == "channel_stack") CHECK(r.aux_channels == 16 * 8);
    if (r.implementation == "channel_stack_cc") CHECK(r.aux_channels == 4 * 8);
    if (r.implementation == "conv_stack") CHECK(r.aux_channels == 16 * 8);
    if (r.implementation == "conv_stack_cc") CHECK(r.aux_channels == 4 * 8);
  }
}

TEST_CASE("bench csv format") {
  std::vector<BenchConfig> configs = sccl::parse_sweep("cin=8;cout=8;cg=2;co=50;spatial=3;batch=1");
  sccl::BenchOptions opts;
  opts.repeats = 1;
  const std::vector<BenchRow> rows = sccl::run_bench(configs, opts);
  std::ostringstream out;
  sccl::write_bench_csv(rows, out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "implementation,phase,c_in,c_out,cg,co,spatial,batch,wall_ms,aux_channels");
  std::size_t count = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) ++count;
  }
  CHECK(count == rows.size());
}
