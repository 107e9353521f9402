#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sccl/config.hpp"

namespace sccl {

/// One benchmark operating point.
struct BenchConfig {
  std::int64_t c_in = 64;
  std::int64_t c_out = 64;
  std::int64_t cg = 2;
  Overlap co = Overlap::ratio(0.5);
  std::int64_t spatial = 16;
  std::int64_t batch = 8;
};

/// One timed measurement. implementation ∈ {direct, channel_stack,
/// channel_stack_cc, conv_stack, conv_stack_cc}; phase ∈ {forward,
/// backward}. aux_channels is the implementation's stacked-channel storage
/// (0 for the direct kernel).
struct BenchRow {
  std::string implementation;
  std::string phase;
  BenchConfig config;
  double wall_ms = 0.0;
  std::int64_t aux_channels = 0;
};

struct BenchOptions {
  std::int64_t repeats = 3;  // timed repetitions after one discarded warm-up
  std::uint64_t seed = 1;
};

/// Parses "cg=2,4,8;co=25,50,75;cin=64;cout=64;spatial=16;batch=8" into the
/// cross product of the listed values (unlisted keys keep BenchConfig
/// defaults). co values are fractions of the window: with a '%' suffix or
/// when > 1 they are percentages, otherwise direct fractions ("0.5").
/// Throws ArgumentError on unknown keys, empty lists, or non-positive
/// values.
std::vector<BenchConfig> parse_sweep(const std::string& sweep);

/// Times every implementation × phase on every config: builds seeded input,
/// weights, and output cotangent; gates on all five forward implementations
/// agreeing elementwise within 1e-12 (NumericError otherwise); then reports
/// the mean wall time of opts.repeats runs after one warm-up.
std::vector<BenchRow> run_bench(const std::vector<BenchConfig>& configs,
                                const BenchOptions& opts);

/// CSV with header implementation,phase,c_in,c_out,cg,co,spatial,batch,
/// wall_ms,aux_channels.
void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace sccl
