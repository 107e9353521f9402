#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sccl {

/// Layer kinds the cost model knows how to count.
enum class LayerKind {
  kStandard,        // dense W×W convolution over all input channels
  kDepthwise,       // one W×W filter per channel, c_out = c_in
  kPointwise,       // 1×1 over all input channels
  kGroupPointwise,  // 1×1 within cg disjoint channel groups
  kScc,             // 1×1 over a sliding cyclic window of c_in/cg channels
  kDscBlock,        // depthwise stage followed by an SCC stage
};

const char* layer_kind_name(LayerKind kind);

/// Geometry a single layer's cost depends on. kernel/stride describe the
/// spatial stage (Standard, Depthwise, DscBlock); the 1×1 kinds ignore them.
/// cg applies to GroupPointwise/Scc/DscBlock. The window overlap of an SCC
/// layer never affects its cost, so it does not appear here.
struct LayerSpec {
  LayerKind kind = LayerKind::kStandard;
  std::int64_t c_in = 0;
  std::int64_t c_out = 0;
  std::int64_t kernel = 1;   // spatial size W
  std::int64_t stride = 1;
  std::int64_t spatial = 0;  // input spatial extent F (square map)
  std::int64_t cg = 1;
  bool count_bias = false;
};

/// Multiply-accumulate and parameter counts; MACs are per sample.
struct CostReport {
  std::int64_t macs = 0;
  std::int64_t params = 0;
  std::int64_t flops() const { return 2 * macs; }
};

/// Fractions variant/base for operations and parameters.
struct ReductionRatio {
  double flops_ratio = 0.0;
  double params_ratio = 0.0;
};

/// Output spatial extent of one layer: 1×1 kinds preserve the map (stride
/// permitting); spatial kinds pad by floor(W/2) to keep same-size maps at
/// stride 1.
std::int64_t layer_output_extent(const LayerSpec& spec);

/// Closed-form per-layer cost. Throws ConfigError on an invalid spec
/// (non-positive extents, cg not dividing c_in, depthwise with c_out != c_in).
CostReport layer_cost(const LayerSpec& spec);

/// Fieldwise sum over layers; throws ArgumentError on an empty list.
CostReport model_cost(const std::vector<LayerSpec>& layers);

/// variant/base for MACs (equivalently FLOPs) and params. Throws
/// ArgumentError when a base count is zero.
ReductionRatio reduction_ratio(const CostReport& base, const CostReport& variant);

}  // namespace sccl
