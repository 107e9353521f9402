#include "sccl/cost.hpp"

#include <string>

#include "sccl/errors.hpp"
#include "sccl/reference.hpp"

namespace sccl {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kStandard: return "standard";
    case LayerKind::kDepthwise: return "depthwise";
    case LayerKind::kPointwise: return "pointwise";
    case LayerKind::kGroupPointwise: return "group_pointwise";
    case LayerKind::kScc: return "scc";
    case LayerKind::kDscBlock: return "dsc_block";
  }
  return "unknown";
}

namespace {

bool is_spatial_kind(LayerKind kind) {
  return kind == LayerKind::kStandard || kind == LayerKind::kDepthwise ||
         kind == LayerKind::kDscBlock;
}

void validate_layer_spec(const LayerSpec& spec) {
  if (spec.c_in < 1 || spec.c_out < 1) throw ConfigError("channel counts must be >= 1");
  if (spec.spatial < 1) throw ConfigError("input spatial extent must be >= 1");
  if (spec.stride < 1) throw ConfigError("stride must be >= 1");
  if (is_spatial_kind(spec.kind)) {
    if (spec.kernel < 1) throw ConfigError("kernel size must be >= 1");
  } else if (spec.kernel != 1) {
    throw ConfigError(std::string(layer_kind_name(spec.kind)) + " layers are 1x1");
  }
  if (spec.kind == LayerKind::kDepthwise && spec.c_out != spec.c_in) {
    throw ConfigError("depthwise layers require c_out = c_in");
  }
  const bool grouped = spec.kind == LayerKind::kGroupPointwise ||
                       spec.kind == LayerKind::kScc ||
                       spec.kind == LayerKind::kDscBlock;
  if (grouped) {
    if (spec.cg < 1 || spec.cg > spec.c_in || spec.c_in % spec.cg != 0) {
      throw ConfigError("cg=" + std::to_string(spec.cg) + " must divide c_in=" +
                        std::to_string(spec.c_in));
    }
    if (spec.kind == LayerKind::kGroupPointwise && spec.c_out % spec.cg != 0) {
      throw ConfigError("group-pointwise needs cg dividing c_out");
    }
  } else if (spec.cg != 1) {
    throw ConfigError(std::string(layer_kind_name(spec.kind)) + " layers take no cg");
  }
}

}  // namespace

std::int64_t layer_output_extent(const LayerSpec& spec) {
  const std::int64_t kernel = is_spatial_kind(spec.kind) ? spec.kernel : 1;
  const std::int64_t padding = is_spatial_kind(spec.kind) ? kernel / 2 : 0;
  return conv_output_extent(spec.spatial, kernel, spec.stride, padding);
}

CostReport layer_cost(const LayerSpec& spec) {
  validate_layer_spec(spec);
  const std::int64_t f_out = layer_output_extent(spec);
  if (f_out < 1) throw ConfigError("layer produces an empty spatial map");
  const std::int64_t area = f_out * f_out;
  const std::int64_t window = spec.c_in / spec.cg;  // 1×1 window width

  CostReport report;
  switch (spec.kind) {
    case LayerKind::kStandard:
      report.macs = area * spec.c_out * spec.kernel * spec.kernel * spec.c_in;
      report.params = spec.kernel * spec.kernel * spec.c_in * spec.c_out;
      if (spec.count_bias) report.params += spec.c_out;
      break;
    case LayerKind::kDepthwise:
      report.macs = area * spec.c_in * spec.kernel * spec.kernel;
      report.params = spec.kernel * spec.kernel * spec.c_in;
      if (spec.count_bias) report.params += spec.c_in;
      break;
    case LayerKind::kPointwise:
      report.macs = area * spec.c_out * spec.c_in;
      report.params = spec.c_in * spec.c_out;
      if (spec.count_bias) report.params += spec.c_out;
      break;
    case LayerKind::kGroupPointwise:
    case LayerKind::kScc:
      report.macs = area * spec.c_out * window;
      report.params = spec.c_out * window;
      if (spec.count_bias) report.params += spec.c_out;
      break;
    case LayerKind::kDscBlock: {
      // Depthwise stage carries the kernel and stride; the SCC stage runs
      // 1×1 on the post-stride map.
      LayerSpec dw = spec;
      dw.kind = LayerKind::kDepthwise;
      dw.c_out = spec.c_in;
      dw.cg = 1;
      LayerSpec scc = spec;
      scc.kind = LayerKind::kScc;
      scc.kernel = 1;
      scc.stride = 1;
      scc.spatial = layer_output_extent(dw);
      const CostReport dw_cost = layer_cost(dw);
      const CostReport scc_cost = layer_cost(scc);
      report.macs = dw_cost.macs + scc_cost.macs;
      report.params = dw_cost.params + scc_cost.params;
      break;
    }
  }
  return report;
}

CostReport model_cost(const std::vector<LayerSpec>& layers) {
  if (layers.empty()) throw ArgumentError("model_cost needs at least one layer");
  CostReport total;
  for (const LayerSpec& layer : layers) {
    const CostReport r = layer_cost(layer);
    total.macs += r.macs;
    total.params += r.params;
  }
  return total;
}

ReductionRatio reduction_ratio(const CostReport& base, const CostReport& variant) {
  if (base.macs <= 0 || base.params <= 0) {
    throw ArgumentError("reduction_ratio base counts must be positive");
  }
  ReductionRatio r;
  r.flops_ratio = static_cast<double>(variant.macs) / static_cast<double>(base.macs);
  r.params_ratio =
      static_cast<double>(variant.params) / static_cast<double>(base.params);
  return r;
}

}  // namespace sccl
