#include "sccl/cycle.hpp"

#include <string>

#include "sccl/errors.hpp"

namespace sccl {

ChannelCycle compute_channel_cycle(const SccConfig& cfg) {
  ChannelCycle cycle;
  std::vector<char> seen(static_cast<std::size_t>(cfg.c_in), 0);
  std::int64_t start = 0;
  while (static_cast<std::int64_t>(cycle.windows.size()) < cfg.c_out) {
    if (seen[static_cast<std::size_t>(start)]) break;  // first repeated window
    seen[static_cast<std::size_t>(start)] = 1;
    cycle.windows.push_back({start, cfg.group_width});
    start = (start + cfg.shift) % cfg.c_in;
  }
  cycle.cyclic_dist = static_cast<std::int64_t>(cycle.windows.size());
  return cycle;
}

const ChannelWindow& window_of(const ChannelCycle& cycle, std::int64_t oc) {
  if (oc < 0) throw IndexError("output channel must be >= 0, got " + std::to_string(oc));
  return cycle.windows[static_cast<std::size_t>(oc % cycle.cyclic_dist)];
}

std::vector<std::int64_t> covering_filters(const SccConfig& cfg,
                                           const ChannelCycle& cycle,
                                           std::int64_t ic) {
  if (ic < 0 || ic >= cfg.c_in) {
    throw IndexError("input channel " + std::to_string(ic) + " out of range [0, " +
                     std::to_string(cfg.c_in) + ")");
  }
  std::vector<std::int64_t> filters;
  for (std::int64_t oc = 0; oc < cfg.c_out; ++oc) {
    if (window_of(cycle, oc).contains(ic, cfg.c_in)) filters.push_back(oc);
  }
  return filters;
}

}  // namespace sccl
