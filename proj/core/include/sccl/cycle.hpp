#pragma once

#include <cstdint>
#include <vector>

#include "sccl/config.hpp"

namespace sccl {

/// One contiguous cyclic window over the input-channel ring: channels
/// (start + k) mod c_in for k in [0, length). start+length may exceed c_in;
/// the window then wraps past the last channel back to channel 0.
struct ChannelWindow {
  std::int64_t start = 0;
  std::int64_t length = 0;

  /// Whether input channel ch (in [0, c_in)) falls inside this window.
  bool contains(std::int64_t ch, std::int64_t c_in) const {
    return (ch - start + c_in) % c_in < length;
  }

  /// Last channel covered, on the ring: (start + length - 1) mod c_in.
  std::int64_t last(std::int64_t c_in) const { return (start + length - 1) % c_in; }

  bool operator==(const ChannelWindow&) const = default;
};

/// The ordered list of distinct windows the filter sequence cycles through.
/// Filter oc uses windows[oc mod cyclic_dist].
struct ChannelCycle {
  std::vector<ChannelWindow> windows;
  std::int64_t cyclic_dist = 0;  // == windows.size()
};

/// Walks the window sequence from start 0, each next start offset by
/// cfg.shift on the channel ring, stopping at the first repeated window or
/// after cfg.c_out windows, whichever comes first.
ChannelCycle compute_channel_cycle(const SccConfig& cfg);

/// Window of output channel oc (oc >= 0): windows[oc mod cyclic_dist].
const ChannelWindow& window_of(const ChannelCycle& cycle, std::int64_t oc);

/// All output channels whose window covers input channel ic, ascending.
/// This is the inverse map the input-gradient pass walks so that each input
/// element pulls its contributions instead of racing on shared accumulators.
std::vector<std::int64_t> covering_filters(const SccConfig& cfg,
                                           const ChannelCycle& cycle,
                                           std::int64_t ic);

}  // namespace sccl
