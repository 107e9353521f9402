#include <vector>

#include <doctest.h>

#include "sccl/config.hpp"
#include "sccl/cycle.hpp"
#include "sccl/errors.hpp"
#include "support/oracles.hpp"

using sccl::ChannelCycle;
using sccl::Overlap;
using sccl::SccConfig;

namespace {

std::vector<std::int64_t> starts_of(const ChannelCycle& cyc) {
  std::vector<std::int64_t> out;
  for (const auto& w : cyc.windows) out.push_back(w.start);
  return out;
}

std::vector<std::int64_t> all_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 1; d <= n; ++d) {
    if (n % d == 0) out.push_back(d);
  }
  return out;
}

}  // namespace

TEST_CASE("cycle enumeration examples") {
  const SccConfig a = sccl::scc_config_new(4, 4, 2, Overlap::ratio(0.5), true);
  const ChannelCycle ca = sccl::compute_channel_cycle(a);
  CHECK(ca.cyclic_dist == 4);
  CHECK(starts_of(ca) == std::vector<std::int64_t>{0, 1, 2, 3});

  const SccConfig b = sccl::scc_config_new(6, 6, 2, Overlap::parse("33%"), true);
  const ChannelCycle cb = sccl::compute_channel_cycle(b);
  CHECK(cb.cyclic_dist == 3);
  CHECK(starts_of(cb) == std::vector<std::int64_t>{0, 2, 4});

  const SccConfig stuck = sccl::scc_config_new(4, 4, 2, Overlap::channels(2), true);
  CHECK(sccl::compute_channel_cycle(stuck).cyclic_dist == 1);
}

TEST_CASE("cycle is capped by the filter count") {
  const SccConfig cfg = sccl::scc_config_new(8, 4, 8, Overlap::channels(0), true);
  REQUIRE(cfg.shift == 1);
  const ChannelCycle cyc = sccl::compute_channel_cycle(cfg);
  CHECK(cyc.cyclic_dist == 4);
  CHECK(starts_of(cyc) == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("window lookup wraps by the cycle length") {
  const SccConfig cfg = sccl::scc_config_new(4, 4, 2, Overlap::channels(1), true);
  const ChannelCycle cyc = sccl::compute_channel_cycle(cfg);
  const sccl::ChannelWindow w3 = sccl::window_of(cyc, 3);
  CHECK(w3.start == 3);
  CHECK(w3.contains(3, cfg.c_in));
  CHECK(w3.contains(0, cfg.c_in));
  CHECK_FALSE(w3.contains(1, cfg.c_in));
  CHECK(w3.last(cfg.c_in) == 0);
  CHECK(sccl::window_of(cyc, 7) == w3);
  CHECK(sccl::window_of(cyc, 0).start == 0);
  CHECK_THROWS_AS(sccl::window_of(cyc, -1), sccl::IndexError);
}

TEST_CASE("covering filters examples") {
  const SccConfig a = sccl::scc_config_new(4, 4, 2, Overlap::channels(1), true);
  const ChannelCycle ca = sccl::compute_channel_cycle(a);
  CHECK(sccl::covering_filters(a, ca, 1) == std::vector<std::int64_t>{0, 1});

  const SccConfig wide = sccl::scc_config_new(4, 8, 2, Overlap::channels(1), true);
  const ChannelCycle cw = sccl::compute_channel_cycle(wide);
  CHECK(sccl::covering_filters(wide, cw, 3) ==
        std::vector<std::int64_t>{2, 3, 6, 7});

  const SccConfig dense = sccl::scc_config_new(4, 5, 1, Overlap::ratio(0.5), true);
  const ChannelCycle cd = sccl::compute_channel_cycle(dense);
  for (std::int64_t ic = 0; ic < 4; ++ic) {
    CHECK(sccl::covering_filters(dense, cd, ic) ==
          std::vector<std::int64_t>{0, 1, 2, 3, 4});
  }

  CHECK_THROWS_AS(sccl::covering_filters(a, ca, 4), sccl::IndexError);
  CHECK_THROWS_AS(sccl::covering_filters(a, ca, -1), sccl::IndexError);
}

TEST_CASE("cycle length agrees with brute force and the gcd closed form") {
  for (const std::int64_t c_in : {2, 4, 6, 8, 12, 16}) {
    for (const std::int64_t cg : all_divisors(c_in)) {
      const std::int64_t gw = c_in / cg;
      for (std::int64_t ov = 0; ov <= gw; ++ov) {
        for (const std::int64_t c_out : {c_in, 2 * c_in}) {
          const SccConfig cfg =
              sccl::scc_config_new(c_in, c_out, cg, Overlap::channels(ov), true);
          const ChannelCycle cyc = sccl::compute_channel_cycle(cfg);
          const auto brute = oracles::brute_force_cycle_starts(cfg);
          REQUIRE(cyc.cyclic_dist == static_cast<std::int64_t>(brute.size()));
          REQUIRE(cyc.cyclic_dist == oracles::gcd_cycle_distance(cfg));
          CHECK(starts_of(cyc) == brute);
          // Lookup past the stored cycle equals the un-truncated recurrence.
          for (std::int64_t oc = 0; oc < c_out; ++oc) {
            CHECK(sccl::window_of(cyc, oc).start == (oc * cfg.shift) % c_in);
          }
        }
      }
    }
  }
}

TEST_CASE("covering filters invert window membership") {
  for (const std::int64_t c_in : {4, 6, 8, 12}) {
    for (const std::int64_t cg : all_divisors(c_in)) {
      const std::int64_t gw = c_in / cg;
      for (std::int64_t ov = 0; ov <= gw; ++ov) {
        for (const std::int64_t c_out : {c_in, 2 * c_in}) {
          const SccConfig cfg =
              sccl::scc_config_new(c_in, c_out, cg, Overlap::channels(ov), true);
          const ChannelCycle cyc = sccl::compute_channel_cycle(cfg);
          for (std::int64_t ic = 0; ic < c_in; ++ic) {
            const auto covering = sccl::covering_filters(cfg, cyc, ic);
            std::size_t pos = 0;
            for (std::int64_t oc = 0; oc < c_out; ++oc) {
              const bool member = sccl::window_of(cyc, oc).contains(ic, c_in);
              const bool listed =
                  pos < covering.size() && covering[pos] == oc;
              CHECK(member == listed);
              if (listed) ++pos;
            }
            CHECK(pos == covering.size());
          }
        }
      }
    }
  }
}

TEST_CASE("zero overlap covering matches disjoint channel groups") {
  const SccConfig cfg = sccl::scc_config_new(12, 12, 3, Overlap::channels(0), true);
  const ChannelCycle cyc = sccl::compute_channel_cycle(cfg);
  for (std::int64_t ic = 0; ic < cfg.c_in; ++ic) {
    const std::int64_t group = ic / cfg.group_width;
    const auto covering = sccl::covering_filters(cfg, cyc, ic);
    for (const std::int64_t oc : covering) CHECK(oc % cfg.cg == group);
    CHECK(static_cast<std::int64_t>(covering.size()) == cfg.c_out / cfg.cg);
  }
}
